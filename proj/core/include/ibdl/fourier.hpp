#pragma once

#include <complex>
#include <vector>

#include "ibdl/grid.hpp"

namespace ibdl {

using Complex = std::complex<double>;

// Real-to-complex transform pair for one N x N size. The half spectrum is
// stored as N rows (y wavenumber) of N/2+1 columns (x wavenumber).
class FourierPlans {
public:
    explicit FourierPlans(int n);
    ~FourierPlans();
    FourierPlans(const FourierPlans&) = delete;
    FourierPlans& operator=(const FourierPlans&) = delete;

    int n() const { return n_; }
    int half() const { return n_ / 2 + 1; }
    std::size_t spectrum_size() const { return static_cast<std::size_t>(n_) * half(); }

    // Unnormalised forward transform.
    void forward(const double* in, Complex* out) const;
    // Inverse transform including the 1/N^2 factor. The input is left intact.
    void inverse(const Complex* in, double* out) const;

    // Shared, reference-counted plans for a given size.
    static std::shared_ptr<const FourierPlans> get(int n);

private:
    int n_;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

using Spectrum = std::vector<Complex>;

Spectrum fft(const ScalarField& f);
ScalarField ifft(const Spectrum& s, const PeriodicGrid& g);

// Per-mode multipliers of the discrete operators for one grid and scheme.
// A first derivative acts as multiplication by i*s, where s is the real
// "derivative symbol" stored here.
class Symbols {
public:
    Symbols(const PeriodicGrid& g, DiffScheme scheme);

    int n() const { return n_; }
    int half() const { return n_ / 2 + 1; }
    std::size_t mode(int kx, int ky) const { return static_cast<std::size_t>(ky) * half() + kx; }

    double sx(int kx) const { return sx_[kx]; }
    double sy(int ky) const { return sy_[ky]; }
    // Symbol of the operator's own Laplacian (full |k|^2 for spectral,
    // five-point for finite differences).
    double laplacian(int kx, int ky) const { return lx_[kx] + ly_[ky]; }
    // Symbol of divergence composed with gradient.
    double composite(int kx, int ky) const { return -(sx_[kx] * sx_[kx] + sy_[ky] * sy_[ky]); }
    double pressure(int kx, int ky, PressureLaplacian which) const {
        return which == PressureLaplacian::Consistent ? composite(kx, ky) : laplacian(kx, ky);
    }
    DiffScheme scheme() const { return scheme_; }

private:
    int n_;
    DiffScheme scheme_;
    std::vector<double> sx_, sy_, lx_, ly_;
};

// Pressure Laplacian implied by a (scheme, stencil) pair: Spectral always
// uses the composite symbol, finite differences use Wide -> composite and
// Standard5 -> five-point.
PressureLaplacian pressure_laplacian_for(DiffScheme scheme, Stencil stencil);

// True when |lambda| is numerically zero relative to the largest symbol.
inline bool null_symbol(double lambda, double scale) { return std::abs(lambda) <= 1e-12 * scale; }

}  // namespace ibdl
