#include "ibdl/fluid_solvers.hpp"

#include <cmath>
#include <stdexcept>

#include "spectral_ops.hpp"

namespace ibdl {

using detail::safe_inverse;

void FluidProblem::validate() const {
    const std::size_t n = boundary.size();
    if (ub_x.size() != n || ub_y.size() != n) throw std::invalid_argument("boundary velocity length mismatch");
    if (!(mu > 0.0)) throw std::invalid_argument("viscosity must be positive");
    if (k2 < 0.0) throw std::invalid_argument("k2 must be non-negative");
    if (eta < 0.0) throw std::invalid_argument("eta must be non-negative");
    if (scheme == DiffScheme::Spectral && stencil == Stencil::Wide)
        throw std::invalid_argument("the wide stencil requires finite differences");
    if (!rhs.grid().same_as(grid)) throw std::invalid_argument("right-hand side lives on a different grid");
    if (boundary.normals.size() != n) throw std::invalid_argument("boundary has no normals");
    interpolation.validate();
}

namespace {

struct VectorSpectrum {
    Spectrum x, y;
};

class FluidContext {
public:
    FluidContext(const FluidProblem& p, bool need_mask)
        : p_(p),
          coupler_(p.boundary, p.grid, p.kernel),
          ops_(p.grid, p.scheme, p.scheme == DiffScheme::FiniteDifference && p.stencil == Stencil::Wide,
               pressure_laplacian_for(p.scheme, p.stencil)),
          mask_(p.grid),
          g_ext_(p.grid) {
        if (need_mask) {
            const int band = p.interpolation.band(p.grid.n());
            if (p.mask) {
                mask_ = *p.mask;
                if (mask_.band != band) flag_near_boundary(mask_, p.boundary, band);
            } else {
                mask_ = compute_indicator(p.boundary, p.grid, p.kernel, p.scheme, band);
            }
            g_ext_ = VectorField(extend_rhs(p.rhs.u, mask_, p.extension), extend_rhs(p.rhs.v, mask_, p.extension));
        }
    }

    const Coupler& coupler() const { return coupler_; }
    const IndicatorMask& mask() const { return mask_; }
    const VectorField& g_ext() const { return g_ext_; }
    const detail::SpectralOps& ops() const { return ops_; }
    std::size_t n_ib() const { return p_.boundary.size(); }

    double lhat(int kx, int ky) const { return p_.mu * ops_.lap(kx, ky) - p_.k2; }

    // Velocity part L^-1 P applied to a forcing spectrum (in place), plus an
    // optional mass source contribution -grad Delta0^-1 src.
    VectorField velocity(VectorSpectrum f, const Spectrum* source) const {
        const auto& sym = ops_.sym();
        ops_.for_each_mode([&](int kx, int ky, std::size_t m) {
            const double sx = sym.sx(kx), sy = sym.sy(ky);
            const double lp = ops_.plap(kx, ky);
            Complex a = f.x[m], b = f.y[m];
            if (lp != 0.0) {
                const Complex dv = sx * a + sy * b;
                a += sx * dv / lp;
                b += sy * dv / lp;
            }
            const double li = safe_inverse(lhat(kx, ky));
            a *= li;
            b *= li;
            if (source && lp != 0.0) {
                const Complex s = (*source)[m] / lp;
                a -= Complex(0.0, sx) * s;
                b -= Complex(0.0, sy) * s;
            }
            f.x[m] = a;
            f.y[m] = b;
        });
        return VectorField(ops_.inverse(f.x), ops_.inverse(f.y));
    }

    // p = -Delta0^-1 L src - Delta0^-1 div f.
    ScalarField pressure(const VectorSpectrum& f, const Spectrum* source) const {
        const auto& sym = ops_.sym();
        Spectrum out(ops_.modes());
        ops_.for_each_mode([&](int kx, int ky, std::size_t m) {
            const double lp = ops_.plap(kx, ky);
            if (lp == 0.0) return;
            Complex v = -(Complex(0.0, sym.sx(kx)) * f.x[m] + Complex(0.0, sym.sy(ky)) * f.y[m]) / lp;
            if (source) v -= lhat(kx, ky) * (*source)[m] / lp;
            out[m] = v;
        });
        return ops_.inverse(out);
    }

    VectorSpectrum spread_hat(std::span<const double> fx, std::span<const double> fy) const {
        return {ops_.forward(coupler_.spread(fx)), ops_.forward(coupler_.spread(fy))};
    }

    VectorSpectrum field_hat(const VectorField& v) const { return {ops_.forward(v.u), ops_.forward(v.v)}; }

    // Transforms of eta S Q + mu div(S A) and of S(Q . n).
    std::pair<VectorSpectrum, Spectrum> layer_hat(std::span<const double> qx, std::span<const double> qy) const {
        const auto& b = p_.boundary;
        const std::size_t n = n_ib();
        std::vector<double> a11(n), a12(n), a22(n), qn(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 nn = b.normals[i];
            a11[i] = 2.0 * qx[i] * nn.x;
            a12[i] = qx[i] * nn.y + qy[i] * nn.x;
            a22[i] = 2.0 * qy[i] * nn.y;
            qn[i] = qx[i] * nn.x + qy[i] * nn.y;
        }
        Spectrum src = ops_.forward(coupler_.spread(qn));
        const double mu = p_.mu, eta = p_.eta;
        if (p_.scheme == DiffScheme::FiniteDifference) {
            // Stencil divergence in physical space, one transform per component.
            ScalarField s11 = coupler_.spread(a11), s12 = coupler_.spread(a12), s22 = coupler_.spread(a22);
            ScalarField wx = derivative_x(s11, p_.scheme) + derivative_y(s12, p_.scheme);
            ScalarField wy = derivative_x(s12, p_.scheme) + derivative_y(s22, p_.scheme);
            wx *= mu;
            wy *= mu;
            if (eta != 0.0) {
                std::vector<double> ex(qx.begin(), qx.end()), ey(qy.begin(), qy.end());
                for (double& v : ex) v *= eta;
                for (double& v : ey) v *= eta;
                coupler_.spread_into(ex, wx);
                coupler_.spread_into(ey, wy);
            }
            return {VectorSpectrum{ops_.forward(wx), ops_.forward(wy)}, std::move(src)};
        }
        Spectrum h11 = ops_.forward(coupler_.spread(a11));
        Spectrum h12 = ops_.forward(coupler_.spread(a12));
        Spectrum h22 = ops_.forward(coupler_.spread(a22));
        Spectrum sqx, sqy;
        if (eta != 0.0) {
            sqx = ops_.forward(coupler_.spread(qx));
            sqy = ops_.forward(coupler_.spread(qy));
        }
        const auto& sym = ops_.sym();
        ops_.for_each_mode([&](int kx, int ky, std::size_t m) {
            const Complex dx(0.0, sym.sx(kx)), dy(0.0, sym.sy(ky));
            Complex wx = mu * (dx * h11[m] + dy * h12[m]);
            Complex wy = mu * (dx * h12[m] + dy * h22[m]);
            if (eta != 0.0) {
                wx += eta * sqx[m];
                wy += eta * sqy[m];
            }
            h11[m] = wx;
            h22[m] = wy;
        });
        return {VectorSpectrum{std::move(h11), std::move(h22)}, std::move(src)};
    }

private:
    const FluidProblem& p_;
    Coupler coupler_;
    detail::SpectralOps ops_;
    IndicatorMask mask_;
    VectorField g_ext_;
};

KrylovOptions krylov_options(const FluidProblem& p) {
    KrylovOptions o;
    o.tolerance = p.tolerance;
    o.max_iterations = p.max_iterations.value_or(default_max_iterations(2 * p.boundary.size()));
    return o;
}

VectorSpectrum subtract(VectorSpectrum a, const VectorSpectrum& b) {
    for (std::size_t m = 0; m < a.x.size(); ++m) {
        a.x[m] -= b.x[m];
        a.y[m] -= b.y[m];
    }
    return a;
}

bool double_layer_augmented(const FluidProblem& p) { return p.k2 == 0.0 && p.eta > 0.0; }

// Symmetrised single-layer apply: y = -D^{1/2} S* L^-1 P S D^{-1/2} x (+ mean rows).
void single_layer_apply(const FluidContext& ctx, const std::vector<double>& d, double scale, bool augmented,
                        std::span<const double> x, std::span<double> y) {
    const std::size_t n = ctx.n_ib();
    std::vector<double> fx(n), fy(n);
    for (std::size_t i = 0; i < n; ++i) {
        fx[i] = x[i] / d[i];
        fy[i] = x[n + i] / d[i];
    }
    const VectorField u = ctx.velocity(ctx.spread_hat(fx, fy), nullptr);
    const auto sx = ctx.coupler().interpolate(u.u);
    const auto sy = ctx.coupler().interpolate(u.v);
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = -scale * d[i] * sx[i];
        y[n + i] = -scale * d[i] * sy[i];
        if (augmented) {
            y[i] += d[i] * x[2 * n];
            y[n + i] += d[i] * x[2 * n + 1];
            cx += d[i] * x[i];
            cy += d[i] * x[n + i];
        }
    }
    if (augmented) {
        y[2 * n] = cx;
        y[2 * n + 1] = cy;
    }
}

void double_layer_apply(const FluidContext& ctx, const FluidProblem& p, std::span<const double> x,
                        std::span<double> y) {
    const std::size_t n = ctx.n_ib();
    const bool augmented = double_layer_augmented(p);
    const auto qx = x.subspan(0, n), qy = x.subspan(n, n);
    auto [w, src] = ctx.layer_hat(qx, qy);
    for (auto* s : {&w.x, &w.y})
        for (Complex& c : *s) c = -c;
    const VectorField u = ctx.velocity(std::move(w), &src);
    const auto sx = ctx.coupler().interpolate(u.u);
    const auto sy = ctx.coupler().interpolate(u.v);
    const double ubx = augmented ? x[2 * n] : 0.0, uby = augmented ? x[2 * n + 1] : 0.0;
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = sx[i] + 0.5 * qx[i] + ubx;
        y[n + i] = sy[i] + 0.5 * qy[i] + uby;
        cx += p.boundary.weights[i] * qx[i];
        cy += p.boundary.weights[i] * qy[i];
    }
    if (augmented) {
        y[2 * n] = p.eta * cx;
        y[2 * n + 1] = p.eta * cy;
    }
}

FluidSolution assemble(const FluidContext& ctx, const FluidProblem& p, VectorField raw, ScalarField pressure,
                       ScalarField source, std::vector<double> dx, std::vector<double> dy, Vec2 ubar,
                       SolveReport report, bool interpolate) {
    VectorField vel = raw;
    if (interpolate) {
        IndicatorMask m = ctx.mask();
        const int band = p.interpolation.band(p.grid.n());
        if (band > 0) {
            if (m.band != band) flag_near_boundary(m, p.boundary, band);
            NearBoundaryInterpolator interp(p.boundary, m, p.interpolation.sample_distance(p.grid.n()));
            vel = VectorField(interp.apply(raw.u, p.ub_x), interp.apply(raw.v, p.ub_y));
        }
    }
    FluidSolution out{std::move(vel), std::move(raw), std::move(pressure), std::move(source), std::move(dx),
                      std::move(dy),  ubar,           {},                  std::move(report),   ctx.mask()};
    return out;
}

}  // namespace

LinearOperator ibsl_fluid_operator(const FluidProblem& p) {
    auto ctx = std::make_shared<FluidContext>(p, false);
    const std::size_t n = p.boundary.size();
    auto d = std::make_shared<std::vector<double>>(n, 1.0);
    return LinearOperator{2 * n, [ctx, d](std::span<const double> x, std::span<double> y) {
                              single_layer_apply(*ctx, *d, 1.0, false, x, y);
                          }};
}

LinearOperator ibdl_fluid_operator(const FluidProblem& p) {
    auto ctx = std::make_shared<FluidContext>(p, false);
    auto prob = std::make_shared<FluidProblem>(p);
    const std::size_t dim = 2 * p.boundary.size() + (double_layer_augmented(p) ? 2 : 0);
    return LinearOperator{dim, [ctx, prob](std::span<const double> x, std::span<double> y) {
                              double_layer_apply(*ctx, *prob, x, y);
                          }};
}

namespace {

FluidSolution solve_single_layer(const FluidProblem& p, bool stokes) {
    p.validate();
    FluidContext ctx(p, true);
    const std::size_t n = ctx.n_ib();
    double mean_ds = 0.0;
    const auto d = detail::weight_scaling(p.boundary.weights, &mean_ds);
    const std::size_t dim = 2 * n + (stokes ? 2 : 0);
    LinearOperator op{dim, [&](std::span<const double> x, std::span<double> y) {
                          single_layer_apply(ctx, d, 1.0, stokes, x, y);
                      }};
    const VectorSpectrum g_hat = ctx.field_hat(ctx.g_ext());
    const VectorField base = ctx.velocity(g_hat, nullptr);
    const auto tx = ctx.coupler().interpolate(base.u);
    const auto ty = ctx.coupler().interpolate(base.v);
    std::vector<double> rhs(dim);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = d[i] * (p.ub_x[i] - tx[i]);
        rhs[n + i] = d[i] * (p.ub_y[i] - ty[i]);
    }
    if (stokes) {
        const double h2 = p.grid.h() * p.grid.h();
        rhs[2 * n] = h2 * detail::grid_sum(ctx.g_ext().u) / mean_ds;
        rhs[2 * n + 1] = h2 * detail::grid_sum(ctx.g_ext().v) / mean_ds;
    }
    auto res = minres(op, rhs, krylov_options(p));
    std::vector<double> fx(n), fy(n);
    for (std::size_t i = 0; i < n; ++i) {
        fx[i] = res.solution[i] / d[i];
        fy[i] = res.solution[n + i] / d[i];
    }
    const Vec2 ubar = stokes ? Vec2{res.solution[2 * n], res.solution[2 * n + 1]} : Vec2{};
    const VectorSpectrum forced = subtract(g_hat, ctx.spread_hat(fx, fy));
    VectorField raw = ctx.velocity(forced, nullptr);
    for (double& v : raw.u.values) v += ubar.x;
    for (double& v : raw.v.values) v += ubar.y;
    ScalarField pressure = ctx.pressure(forced, nullptr);
    auto out = assemble(ctx, p, std::move(raw), std::move(pressure), ScalarField(p.grid), std::move(fx), std::move(fy),
                        ubar, std::move(res.report), false);
    out.unknowns = std::move(res.solution);
    return out;
}

}  // namespace

FluidSolution solve_ibsl_brinkman(const FluidProblem& p) {
    if (!(p.k2 > 0.0)) throw std::invalid_argument("the Brinkman solver needs k2 > 0");
    return solve_single_layer(p, false);
}

FluidSolution solve_ibsl_stokes(const FluidProblem& p) {
    if (p.k2 != 0.0) throw std::invalid_argument("the Stokes solver needs k2 = 0");
    return solve_single_layer(p, true);
}

FluidSolution solve_ibdl_fluid(const FluidProblem& p) {
    p.validate();
    if (p.k2 == 0.0 && !p.interior && p.eta <= 0.0)
        throw std::invalid_argument("exterior Stokes problems need the completed double layer (eta > 0)");
    FluidContext ctx(p, true);
    const std::size_t n = ctx.n_ib();
    const bool augmented = double_layer_augmented(p);
    const std::size_t dim = 2 * n + (augmented ? 2 : 0);
    LinearOperator op{dim, [&](std::span<const double> x, std::span<double> y) { double_layer_apply(ctx, p, x, y); }};
    if (p.operator_override) {
        if (p.operator_override->dimension != dim) throw std::invalid_argument("operator override has the wrong size");
        op = *p.operator_override;
    }
    const VectorSpectrum g_hat = ctx.field_hat(ctx.g_ext());
    const VectorField base = ctx.velocity(g_hat, nullptr);
    const auto tx = ctx.coupler().interpolate(base.u);
    const auto ty = ctx.coupler().interpolate(base.v);
    std::vector<double> rhs(dim);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = p.ub_x[i] - tx[i];
        rhs[n + i] = p.ub_y[i] - ty[i];
    }
    if (augmented) {
        const double h2 = p.grid.h() * p.grid.h();
        rhs[2 * n] = h2 * detail::grid_sum(ctx.g_ext().u);
        rhs[2 * n + 1] = h2 * detail::grid_sum(ctx.g_ext().v);
    }
    std::span<const double> guess;
    if (p.initial_guess) {
        if (p.initial_guess->size() != dim) throw std::invalid_argument("initial guess has the wrong length");
        guess = *p.initial_guess;
    }
    auto res = gmres(op, rhs, krylov_options(p), guess);
    std::vector<double> qx(res.solution.begin(), res.solution.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> qy(res.solution.begin() + static_cast<std::ptrdiff_t>(n),
                           res.solution.begin() + static_cast<std::ptrdiff_t>(2 * n));
    const Vec2 ubar = augmented ? Vec2{res.solution[2 * n], res.solution[2 * n + 1]} : Vec2{};
    auto [w, src] = ctx.layer_hat(qx, qy);
    const VectorSpectrum forced = subtract(g_hat, w);
    VectorField raw = ctx.velocity(forced, &src);
    for (double& v : raw.u.values) v += ubar.x;
    for (double& v : raw.v.values) v += ubar.y;
    ScalarField pressure = ctx.pressure(forced, &src);
    ScalarField source = ctx.ops().inverse(src);
    auto out = assemble(ctx, p, std::move(raw), std::move(pressure), std::move(source), std::move(qx), std::move(qy),
                        ubar, std::move(res.report), true);
    out.unknowns = std::move(res.solution);
    return out;
}

ForceTorque net_force_torque(std::span<const double> dx, std::span<const double> dy, const ImmersedBoundary& b,
                             ForceMethod method, double eta, Vec2 center) {
    if (dx.size() != b.size() || dy.size() != b.size())
        throw std::invalid_argument("density length does not match boundary");
    const double factor = method == ForceMethod::SingleLayer ? 1.0 : eta;
    ForceTorque out;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double w = b.weights[i] * factor;
        out.force.x -= w * dx[i];
        out.force.y -= w * dy[i];
        out.torque -= w * cross(b.points[i] - center, Vec2{dx[i], dy[i]});
    }
    return out;
}

double divergence_residual(const VectorField& velocity_raw, const ScalarField& source, DiffScheme scheme) {
    const auto& g = velocity_raw.grid();
    Symbols sym(g, scheme);
    Spectrum s = fft(source);
    for (int ky = 0; ky < g.n(); ++ky)
        for (int kx = 0; kx < sym.half(); ++kx)
            if (sym.composite(kx, ky) == 0.0) s[sym.mode(kx, ky)] = 0.0;
    ScalarField r = divergence(velocity_raw, scheme) + ifft(s, g);
    return r.max_abs();
}

}  // namespace ibdl
