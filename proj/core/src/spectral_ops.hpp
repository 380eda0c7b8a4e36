#pragma once

// Shared Fourier-space building blocks for the boundary solvers. Every
// operator in a solve is diagonal in the discrete Fourier basis, so the
// solvers transform each spread field once and combine the multipliers.

#include <cmath>
#include <span>
#include <vector>

#include "ibdl/coupling.hpp"
#include "ibdl/fourier.hpp"
#include "ibdl/grid.hpp"

namespace ibdl::detail {

class SpectralOps {
public:
    SpectralOps(const PeriodicGrid& g, DiffScheme scheme, bool wide_operator, PressureLaplacian pressure)
        : grid_(g), scheme_(scheme), sym_(g, scheme), wide_(wide_operator), pressure_(pressure) {}

    const PeriodicGrid& grid() const { return grid_; }
    const Symbols& sym() const { return sym_; }
    DiffScheme scheme() const { return scheme_; }
    int n() const { return grid_.n(); }
    int half() const { return sym_.half(); }
    std::size_t modes() const { return static_cast<std::size_t>(n()) * half(); }

    // Laplacian symbol of the PDE operator.
    double lap(int kx, int ky) const { return wide_ ? sym_.composite(kx, ky) : sym_.laplacian(kx, ky); }
    // Laplacian symbol of the pressure-type mean-zero inverse.
    double plap(int kx, int ky) const { return sym_.pressure(kx, ky, pressure_); }

    Spectrum forward(const ScalarField& f) const { return fft(f); }
    ScalarField inverse(const Spectrum& s) const { return ifft(s, grid_); }

    // Calls f(kx, ky, mode index) for every stored mode.
    template <class F>
    void for_each_mode(F&& f) const {
        const int hf = half();
        for (int ky = 0; ky < n(); ++ky)
            for (int kx = 0; kx < hf; ++kx) f(kx, ky, static_cast<std::size_t>(ky) * hf + kx);
    }

private:
    PeriodicGrid grid_;
    DiffScheme scheme_;
    Symbols sym_;
    bool wide_;
    PressureLaplacian pressure_;
};

inline double safe_inverse(double x) { return x == 0.0 ? 0.0 : 1.0 / x; }

// Diagonal scaling that makes the single-layer systems symmetric for
// non-uniform arclength weights: entries sqrt(ds_i / mean ds).
inline std::vector<double> weight_scaling(const std::vector<double>& weights, double* mean_out = nullptr) {
    double mean = 0.0;
    for (double w : weights) mean += w;
    mean /= static_cast<double>(weights.size());
    std::vector<double> d(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) d[i] = std::sqrt(weights[i] / mean);
    if (mean_out) *mean_out = mean;
    return d;
}

inline double grid_sum(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s;
}

}  // namespace ibdl::detail
