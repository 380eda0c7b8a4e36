#include "ibdl/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace ibdl {

namespace {
// FFTW's planner is not re-entrant; execution of existing plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FourierPlans::FourierPlans(int n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    const std::size_t real_size = static_cast<std::size_t>(n) * n;
    double* r = fftw_alloc_real(real_size);
    fftw_complex* c = fftw_alloc_complex(spectrum_size());
    // ESTIMATE keeps the chosen algorithm, and so the round-off, identical
    // from run to run. UNALIGNED lets us execute on std::vector storage.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_plan_ = fftw_plan_dft_r2c_2d(n, n, r, c, flags);
    inverse_plan_ = fftw_plan_dft_c2r_2d(n, n, c, r, flags);
    fftw_free(r);
    fftw_free(c);
}

FourierPlans::~FourierPlans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void FourierPlans::forward(const double* in, Complex* out) const {
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void FourierPlans::inverse(const Complex* in, double* out) const {
    // c2r overwrites its input, so work on a copy.
    std::vector<Complex> scratch(in, in + spectrum_size());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(scratch.data()),
                         out);
    const double scale = 1.0 / (static_cast<double>(n_) * n_);
    const std::size_t total = static_cast<std::size_t>(n_) * n_;
    for (std::size_t k = 0; k < total; ++k) out[k] *= scale;
}

std::shared_ptr<const FourierPlans> FourierPlans::get(int n) {
    static std::mutex cache_mutex;
    static std::map<int, std::weak_ptr<const FourierPlans>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[n];
    if (auto existing = slot.lock()) return existing;
    auto created = std::make_shared<const FourierPlans>(n);
    slot = created;
    return created;
}

Spectrum fft(const ScalarField& f) {
    const auto& plans = f.grid.plans();
    Spectrum out(plans.spectrum_size());
    plans.forward(f.values.data(), out.data());
    return out;
}

ScalarField ifft(const Spectrum& s, const PeriodicGrid& g) {
    ScalarField out(g);
    g.plans().inverse(s.data(), out.values.data());
    return out;
}

Symbols::Symbols(const PeriodicGrid& g, DiffScheme scheme) : n_(g.n()), scheme_(scheme) {
    const int n = n_;
    const double h = g.h();
    const double two_pi_over_l = 2.0 * std::numbers::pi / g.length();
    auto signed_index = [n](int m) { return m < n / 2 ? m : m - n; };
    auto fill = [&](int count, std::vector<double>& s, std::vector<double>& lap) {
        s.assign(count, 0.0);
        lap.assign(count, 0.0);
        for (int m = 0; m < count; ++m) {
            const int ms = signed_index(m);
            const bool nyquist = (m == n / 2);
            const double k = two_pi_over_l * ms;
            if (scheme == DiffScheme::Spectral) {
                s[m] = nyquist ? 0.0 : k;
                lap[m] = -k * k;
            } else {
                const double theta = k * h;
                s[m] = (m == 0 || nyquist) ? 0.0 : std::sin(theta) / h;
                lap[m] = -(2.0 - 2.0 * std::cos(theta)) / (h * h);
            }
        }
    };
    fill(n / 2 + 1, sx_, lx_);
    fill(n, sy_, ly_);
}

PressureLaplacian pressure_laplacian_for(DiffScheme scheme, Stencil stencil) {
    if (scheme == DiffScheme::Spectral || stencil == Stencil::Wide) return PressureLaplacian::Consistent;
    return PressureLaplacian::Standard5;
}

}  // namespace ibdl
