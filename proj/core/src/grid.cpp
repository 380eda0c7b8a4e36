#include "ibdl/grid.hpp"

#include <algorithm>
#include <cmath>

#include "ibdl/fourier.hpp"
#include "ibdl/postprocess.hpp"

namespace ibdl {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

std::string to_string(DiffScheme s) { return s == DiffScheme::Spectral ? "spectral" : "finite-difference"; }

DiffScheme parse_scheme(const std::string& s) {
    if (s == "spectral") return DiffScheme::Spectral;
    if (s == "finite-difference" || s == "fd") return DiffScheme::FiniteDifference;
    throw std::invalid_argument("unknown scheme '" + s + "' (expected spectral or finite-difference)");
}

PeriodicGrid::PeriodicGrid(int n, double length, Vec2 origin) : n_(n), length_(length), origin_(origin) {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("grid size must be even and at least 4");
    if (!(length > 0.0)) throw std::invalid_argument("box length must be positive");
    plans_ = FourierPlans::get(n);
}

PeriodicGrid::PeriodicGrid(int n, double length) : PeriodicGrid(n, length, Vec2{-length / 2, -length / 2}) {}

ScalarField::ScalarField(const PeriodicGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("field size does not match grid");
}

double ScalarField::mean() const {
    double s = 0.0;
    for (double x : values) s += x;
    return s / static_cast<double>(values.size());
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double x : values) m = std::max(m, std::abs(x));
    return m;
}

bool ScalarField::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& x : values) x *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField::VectorField(ScalarField a, ScalarField b) : u(std::move(a)), v(std::move(b)) {
    if (!u.grid.same_as(v.grid)) throw std::invalid_argument("vector components must share one grid");
}

double VectorField::max_abs() const { return std::max(u.max_abs(), v.max_abs()); }

namespace {

// Applies a per-mode complex multiplier to f.
template <class Mult>
ScalarField apply_multiplier(const ScalarField& f, Mult&& mult) {
    Spectrum s = fft(f);
    const int n = f.grid.n();
    const int half = n / 2 + 1;
    for (int ky = 0; ky < n; ++ky)
        for (int kx = 0; kx < half; ++kx) {
            auto& c = s[static_cast<std::size_t>(ky) * half + kx];
            c *= mult(kx, ky);
        }
    return ifft(s, f.grid);
}

ScalarField stencil_laplacian(const ScalarField& f, int reach) {
    const auto& g = f.grid;
    const int n = g.n();
    const double h = g.h();
    const double scale = 1.0 / (reach * reach * h * h);
    ScalarField out(g);
    for (int j = 0; j < n; ++j) {
        const int jm = g.wrap(j - reach), jp = g.wrap(j + reach);
        for (int i = 0; i < n; ++i) {
            const int im = g.wrap(i - reach), ip = g.wrap(i + reach);
            out(i, j) = (f(im, j) + f(ip, j) + f(i, jm) + f(i, jp) - 4.0 * f(i, j)) * scale;
        }
    }
    return out;
}

void check_mean(const ScalarField& f, Stencil stencil, DiffScheme scheme) {
    const double scale = f.max_abs();
    const double tol = kSolvabilityTol * scale;
    if (scheme == DiffScheme::FiniteDifference && stencil == Stencil::Wide) {
        for (double m : subgrid_means(f))
            if (std::abs(m) > tol)
                throw SolvabilityError("data has nonzero mean on a decoupled subgrid of the wide Laplacian");
    } else if (std::abs(f.mean()) > tol) {
        throw SolvabilityError("data has nonzero mean; the periodic Laplacian cannot be inverted");
    }
}

}  // namespace

ScalarField laplacian(const ScalarField& f, DiffScheme scheme, Stencil stencil) {
    if (scheme == DiffScheme::Spectral) {
        if (stencil == Stencil::Wide) throw std::invalid_argument("the wide stencil requires finite differences");
        Symbols sym(f.grid, scheme);
        return apply_multiplier(f, [&](int kx, int ky) { return Complex(sym.laplacian(kx, ky), 0.0); });
    }
    return stencil_laplacian(f, stencil == Stencil::Wide ? 2 : 1);
}

ScalarField derivative_x(const ScalarField& f, DiffScheme scheme) {
    const auto& g = f.grid;
    if (scheme == DiffScheme::Spectral) {
        Symbols sym(g, scheme);
        return apply_multiplier(f, [&](int kx, int) { return Complex(0.0, sym.sx(kx)); });
    }
    ScalarField out(g);
    const double inv = 1.0 / (2.0 * g.h());
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) out(i, j) = (f(g.wrap(i + 1), j) - f(g.wrap(i - 1), j)) * inv;
    return out;
}

ScalarField derivative_y(const ScalarField& f, DiffScheme scheme) {
    const auto& g = f.grid;
    if (scheme == DiffScheme::Spectral) {
        Symbols sym(g, scheme);
        return apply_multiplier(f, [&](int, int ky) { return Complex(0.0, sym.sy(ky)); });
    }
    ScalarField out(g);
    const double inv = 1.0 / (2.0 * g.h());
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) out(i, j) = (f(i, g.wrap(j + 1)) - f(i, g.wrap(j - 1))) * inv;
    return out;
}

VectorField gradient(const ScalarField& f, DiffScheme scheme) {
    return VectorField(derivative_x(f, scheme), derivative_y(f, scheme));
}

ScalarField divergence(const VectorField& v, DiffScheme scheme) {
    return derivative_x(v.u, scheme) + derivative_y(v.v, scheme);
}

std::array<double, 4> subgrid_means(const ScalarField& f) {
    std::array<double, 4> sums{0, 0, 0, 0};
    const int n = f.grid.n();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) sums[(j % 2) * 2 + (i % 2)] += f(i, j);
    const double per = static_cast<double>(f.values.size()) / 4.0;
    for (double& s : sums) s /= per;
    return sums;
}

ScalarField inv_laplacian_zero_mean(const ScalarField& f, DiffScheme scheme, Stencil stencil, MeanPolicy policy) {
    if (scheme == DiffScheme::Spectral && stencil == Stencil::Wide)
        throw std::invalid_argument("the wide stencil requires finite differences");
    if (policy == MeanPolicy::Check) check_mean(f, stencil, scheme);
    Symbols sym(f.grid, scheme);
    const bool wide = stencil == Stencil::Wide;
    return apply_multiplier(f, [&](int kx, int ky) {
        const double lam = wide ? sym.composite(kx, ky) : sym.laplacian(kx, ky);
        return lam == 0.0 ? Complex(0.0, 0.0) : Complex(1.0 / lam, 0.0);
    });
}

ScalarField helmholtz_inverse(const ScalarField& f, double mu, double k2, DiffScheme scheme, Stencil stencil,
                              MeanPolicy policy) {
    if (!(mu > 0.0)) throw std::invalid_argument("viscosity must be positive");
    if (k2 < 0.0) throw std::invalid_argument("reaction coefficient must be non-negative");
    if (k2 == 0.0) {
        ScalarField u = inv_laplacian_zero_mean(f, scheme, stencil, policy);
        u *= 1.0 / mu;
        return u;
    }
    if (scheme == DiffScheme::Spectral && stencil == Stencil::Wide)
        throw std::invalid_argument("the wide stencil requires finite differences");
    Symbols sym(f.grid, scheme);
    const bool wide = stencil == Stencil::Wide;
    return apply_multiplier(f, [&](int kx, int ky) {
        const double lam = wide ? sym.composite(kx, ky) : sym.laplacian(kx, ky);
        return Complex(1.0 / (mu * lam - k2), 0.0);
    });
}

VectorField leray_project(const VectorField& v, DiffScheme scheme, Stencil stencil) {
    const auto& g = v.grid();
    Symbols sym(g, scheme);
    const PressureLaplacian which = pressure_laplacian_for(scheme, stencil);
    Spectrum a = fft(v.u);
    Spectrum b = fft(v.v);
    const int n = g.n();
    for (int ky = 0; ky < n; ++ky)
        for (int kx = 0; kx < sym.half(); ++kx) {
            const double lam = sym.pressure(kx, ky, which);
            if (lam == 0.0) continue;
            const std::size_t m = sym.mode(kx, ky);
            const double sx = sym.sx(kx), sy = sym.sy(ky);
            // P = I + s s^T / lambda, since grad and div are i*s.
            const Complex dv = sx * a[m] + sy * b[m];
            a[m] += sx * dv / lam;
            b[m] += sy * dv / lam;
        }
    return VectorField(ifft(a, g), ifft(b, g));
}

Norms masked_norms(const ScalarField& err, std::span<const unsigned char> selected) {
    if (selected.size() != err.values.size()) throw std::invalid_argument("mask does not match field");
    std::size_t count = 0;
    Norms out;
    for (std::size_t k = 0; k < selected.size(); ++k) {
        if (!selected[k]) continue;
        const double e = std::abs(err.values[k]);
        ++count;
        out.l1 += e;
        out.l2 += e * e;
        out.linf = std::max(out.linf, e);
    }
    if (count == 0) throw std::invalid_argument("masked norm over an empty mask");
    // With |Omega| = dx*dy*count the area factors cancel.
    out.l1 /= static_cast<double>(count);
    out.l2 = std::sqrt(out.l2 / static_cast<double>(count));
    return out;
}

Norms masked_norms(const ScalarField& err, const IndicatorMask& mask) { return masked_norms(err, mask.inside); }

}  // namespace ibdl
