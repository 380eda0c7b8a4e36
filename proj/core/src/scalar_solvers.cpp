#include "ibdl/scalar_solvers.hpp"

#include <cmath>
#include <stdexcept>

#include "spectral_ops.hpp"

namespace ibdl {

using detail::safe_inverse;

std::string to_string(Extension e) {
    switch (e) {
        case Extension::Zero: return "zero";
        case Extension::Smooth: return "smooth";
        case Extension::MeanBalance: return "mean-balance";
    }
    return "zero";
}

Extension parse_extension(const std::string& s) {
    if (s == "zero") return Extension::Zero;
    if (s == "smooth") return Extension::Smooth;
    if (s == "mean-balance") return Extension::MeanBalance;
    throw std::invalid_argument("unknown extension '" + s + "' (expected zero, smooth or mean-balance)");
}

ScalarField extend_rhs(const ScalarField& g, const IndicatorMask& mask, Extension ext) {
    if (ext == Extension::Smooth) return g;
    ScalarField out(g.grid);
    double inside_sum = 0.0;
    std::size_t outside = 0;
    for (std::size_t k = 0; k < g.values.size(); ++k) {
        if (mask.inside[k]) {
            out.values[k] = g.values[k];
            inside_sum += g.values[k];
        } else {
            ++outside;
        }
    }
    if (ext == Extension::MeanBalance) {
        if (outside == 0) throw std::invalid_argument("mean balancing needs nodes outside Omega");
        const double ge = -inside_sum / static_cast<double>(outside);
        for (std::size_t k = 0; k < g.values.size(); ++k)
            if (!mask.inside[k]) out.values[k] = ge;
    }
    return out;
}

void ScalarProblem::validate() const {
    if (dirichlet.has_value() == neumann.has_value())
        throw std::invalid_argument("exactly one of Dirichlet or Neumann data must be given");
    const auto& data = dirichlet ? *dirichlet : *neumann;
    if (data.size() != boundary.size()) throw std::invalid_argument("boundary data length does not match boundary");
    if (k2 < 0.0) throw std::invalid_argument("k2 must be non-negative");
    if (eta < 0.0) throw std::invalid_argument("eta must be non-negative");
    if (!rhs.grid.same_as(grid)) throw std::invalid_argument("right-hand side lives on a different grid");
    if (boundary.normals.size() != boundary.size()) throw std::invalid_argument("boundary has no normals");
    interpolation.validate();
}

namespace {

IndicatorMask mask_for(const ImmersedBoundary& b, const PeriodicGrid& g, CouplingKernel kernel, DiffScheme scheme,
                       const std::optional<IndicatorMask>& given, int band) {
    if (given) {
        IndicatorMask m = *given;
        if (m.band != band) flag_near_boundary(m, b, band);
        return m;
    }
    return compute_indicator(b, g, kernel, scheme, band);
}

class ScalarContext {
public:
    explicit ScalarContext(const ScalarProblem& p, bool need_mask = true)
        : p_(p),
          coupler_(p.boundary, p.grid, p.kernel),
          ops_(p.grid, p.scheme, false, PressureLaplacian::Consistent),
          mask_(need_mask ? mask_for(p.boundary, p.grid, p.kernel, p.scheme, p.mask, p.interpolation.band(p.grid.n()))
                          : IndicatorMask(p.grid)),
          g_ext_(need_mask ? extend_rhs(p.rhs, mask_, p.extension) : p.rhs) {}

    const Coupler& coupler() const { return coupler_; }
    const IndicatorMask& mask() const { return mask_; }
    const ScalarField& g_ext() const { return g_ext_; }
    std::size_t n_ib() const { return p_.boundary.size(); }

    // (Laplacian - k2)^-1 applied in Fourier space; with k2 = 0 the
    // unreachable mean is dropped.
    ScalarField solve(Spectrum s) const {
        ops_.for_each_mode([&](int kx, int ky, std::size_t m) { s[m] *= safe_inverse(ops_.lap(kx, ky) - p_.k2); });
        return ops_.inverse(s);
    }
    ScalarField solve(const ScalarField& f) const { return solve(ops_.forward(f)); }

    // Transform of S~Q + eta S Q.
    Spectrum layer_hat(std::span<const double> q, double eta) const {
        const auto& b = p_.boundary;
        std::vector<double> qx(n_ib()), qy(n_ib());
        for (std::size_t i = 0; i < n_ib(); ++i) {
            qx[i] = q[i] * b.normals[i].x;
            qy[i] = q[i] * b.normals[i].y;
        }
        if (p_.scheme == DiffScheme::FiniteDifference) {
            ScalarField total = divergence(VectorField(coupler_.spread(qx), coupler_.spread(qy)), p_.scheme);
            if (eta != 0.0) {
                std::vector<double> eq(q.begin(), q.end());
                for (double& v : eq) v *= eta;
                coupler_.spread_into(eq, total);
            }
            return ops_.forward(total);
        }
        Spectrum ax = ops_.forward(coupler_.spread(qx));
        Spectrum ay = ops_.forward(coupler_.spread(qy));
        Spectrum single;
        if (eta != 0.0) single = ops_.forward(coupler_.spread(q));
        const auto& sym = ops_.sym();
        ops_.for_each_mode([&](int kx, int ky, std::size_t m) {
            Complex v = Complex(0.0, sym.sx(kx)) * ax[m] + Complex(0.0, sym.sy(ky)) * ay[m];
            if (eta != 0.0) v += eta * single[m];
            ax[m] = v;
        });
        return ax;
    }

    ScalarField layer_field(std::span<const double> q, double eta) const { return ops_.inverse(layer_hat(q, eta)); }

private:
    const ScalarProblem& p_;
    Coupler coupler_;
    detail::SpectralOps ops_;
    IndicatorMask mask_;
    ScalarField g_ext_;
};

KrylovOptions krylov_options(const ScalarProblem& p) {
    KrylovOptions o;
    o.tolerance = p.tolerance;
    o.max_iterations = p.max_iterations.value_or(default_max_iterations(p.boundary.size()));
    return o;
}

std::vector<double> minus(std::vector<double> a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

ScalarSolution finish(ScalarField u_raw, const ScalarContext& ctx, const ScalarProblem& p,
                      std::span<const double> boundary_values, bool interpolate_near_boundary) {
    ScalarField u = interpolate_near_boundary
                        ? near_boundary_interpolate(u_raw, p.boundary, boundary_values, ctx.mask(), p.interpolation)
                        : u_raw;
    return ScalarSolution{std::move(u), std::move(u_raw), {}, 0.0, {}, ctx.mask()};
}

}  // namespace

LinearOperator ibsl_scalar_operator(const ScalarProblem& p) {
    auto ctx = std::make_shared<ScalarContext>(p, false);
    return LinearOperator{p.boundary.size(), [ctx](std::span<const double> f, std::span<double> y) {
                              const ScalarField u = ctx->solve(ctx->coupler().spread(f));
                              const auto s = ctx->coupler().interpolate(u);
                              for (std::size_t i = 0; i < s.size(); ++i) y[i] = -s[i];
                          }};
}

LinearOperator ibdl_scalar_operator(const ScalarProblem& p) {
    auto ctx = std::make_shared<ScalarContext>(p, false);
    const double eta = p.eta;
    return LinearOperator{p.boundary.size(), [ctx, eta](std::span<const double> q, std::span<double> y) {
                              const ScalarField u = ctx->solve(ctx->layer_hat(q, eta));
                              const auto s = ctx->coupler().interpolate(u);
                              for (std::size_t i = 0; i < s.size(); ++i) y[i] = -s[i] + 0.5 * q[i];
                          }};
}

LinearOperator ibdl_neumann_operator(const ScalarProblem& p) {
    auto ctx = std::make_shared<ScalarContext>(p, false);
    return LinearOperator{p.boundary.size(), [ctx](std::span<const double> q, std::span<double> y) {
                              const ScalarField u = ctx->solve(ctx->layer_hat(q, 0.0));
                              const auto s = ctx->coupler().interpolate(u);
                              for (std::size_t i = 0; i < s.size(); ++i) y[i] = -s[i] - 0.5 * q[i];
                          }};
}

ScalarSolution solve_ibsl_helmholtz(const ScalarProblem& p) {
    p.validate();
    if (!p.dirichlet) throw std::invalid_argument("the single layer solver needs Dirichlet data");
    if (!(p.k2 > 0.0)) throw std::invalid_argument("the Helmholtz solver needs k2 > 0");
    ScalarContext ctx(p);
    const std::size_t n = ctx.n_ib();
    const auto d = detail::weight_scaling(p.boundary.weights);
    // Symmetrised system in G = D^{1/2} F.
    LinearOperator op{n, [&](std::span<const double> gvec, std::span<double> y) {
                          std::vector<double> f(n);
                          for (std::size_t i = 0; i < n; ++i) f[i] = gvec[i] / d[i];
                          const auto s = ctx.coupler().interpolate(ctx.solve(ctx.coupler().spread(f)));
                          for (std::size_t i = 0; i < n; ++i) y[i] = -d[i] * s[i];
                      }};
    const ScalarField base = ctx.solve(ctx.g_ext());
    std::vector<double> rhs = minus(*p.dirichlet, ctx.coupler().interpolate(base));
    for (std::size_t i = 0; i < n; ++i) rhs[i] *= d[i];
    auto res = minres(op, rhs, krylov_options(p));
    std::vector<double> F(n);
    for (std::size_t i = 0; i < n; ++i) F[i] = res.solution[i] / d[i];
    ScalarField forced = ctx.g_ext();
    forced -= ctx.coupler().spread(F);
    ScalarSolution out = finish(ctx.solve(forced), ctx, p, *p.dirichlet, false);
    out.density = std::move(F);
    out.report = std::move(res.report);
    return out;
}

ScalarSolution solve_ibsl_poisson(const ScalarProblem& p) {
    p.validate();
    if (!p.dirichlet) throw std::invalid_argument("the single layer solver needs Dirichlet data");
    if (p.k2 != 0.0) throw std::invalid_argument("the Poisson solver needs k2 = 0");
    ScalarContext ctx(p);
    const std::size_t n = ctx.n_ib();
    double mean_ds = 0.0;
    const auto d = detail::weight_scaling(p.boundary.weights, &mean_ds);
    const double h2 = p.grid.h() * p.grid.h();
    LinearOperator op{n + 1, [&](std::span<const double> x, std::span<double> y) {
                          std::vector<double> f(n);
                          for (std::size_t i = 0; i < n; ++i) f[i] = x[i] / d[i];
                          const auto s = ctx.coupler().interpolate(ctx.solve(ctx.coupler().spread(f)));
                          double constraint = 0.0;
                          for (std::size_t i = 0; i < n; ++i) {
                              y[i] = d[i] * (-s[i] + x[n]);
                              constraint += d[i] * x[i];
                          }
                          y[n] = constraint;
                      }};
    const ScalarField base = ctx.solve(ctx.g_ext());
    const auto trace = ctx.coupler().interpolate(base);
    std::vector<double> rhs(n + 1);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = d[i] * ((*p.dirichlet)[i] - trace[i]);
    rhs[n] = h2 * detail::grid_sum(ctx.g_ext()) / mean_ds;
    auto res = minres(op, rhs, krylov_options(p));
    std::vector<double> F(n);
    for (std::size_t i = 0; i < n; ++i) F[i] = res.solution[i] / d[i];
    const double ubar = res.solution[n];
    ScalarField forced = ctx.g_ext();
    forced -= ctx.coupler().spread(F);
    ScalarField u_raw = ctx.solve(forced);
    for (double& v : u_raw.values) v += ubar;
    ScalarSolution out = finish(std::move(u_raw), ctx, p, *p.dirichlet, false);
    out.density = std::move(F);
    out.mean_correction = ubar;
    out.report = std::move(res.report);
    return out;
}

ScalarSolution solve_ibdl_scalar(const ScalarProblem& p) {
    p.validate();
    if (!p.dirichlet) throw std::invalid_argument("the double layer Dirichlet solver needs Dirichlet data");
    ScalarContext ctx(p);
    const std::size_t n = ctx.n_ib();
    const bool augmented = p.k2 == 0.0 && p.eta > 0.0;
    const double eta = p.eta;
    const double h2 = p.grid.h() * p.grid.h();
    const std::size_t dim = augmented ? n + 1 : n;
    LinearOperator op{dim, [&](std::span<const double> x, std::span<double> y) {
                          const auto q = x.first(n);
                          const auto s = ctx.coupler().interpolate(ctx.solve(ctx.layer_hat(q, eta)));
                          const double ubar = augmented ? x[n] : 0.0;
                          double constraint = 0.0;
                          for (std::size_t i = 0; i < n; ++i) {
                              y[i] = -s[i] + 0.5 * q[i] + ubar;
                              constraint += p.boundary.weights[i] * q[i];
                          }
                          if (augmented) y[n] = eta * constraint;
                      }};
    const ScalarField base = ctx.solve(ctx.g_ext());
    const auto trace = ctx.coupler().interpolate(base);
    std::vector<double> rhs(dim);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = (*p.dirichlet)[i] - trace[i];
    if (augmented) rhs[n] = h2 * detail::grid_sum(ctx.g_ext());
    auto res = gmres(op, rhs, krylov_options(p));
    std::vector<double> Q(res.solution.begin(), res.solution.begin() + static_cast<std::ptrdiff_t>(n));
    const double ubar = augmented ? res.solution[n] : 0.0;
    ScalarField forced = ctx.g_ext();
    forced -= ctx.layer_field(Q, eta);
    ScalarField u_raw = ctx.solve(forced);
    for (double& v : u_raw.values) v += ubar;
    ScalarSolution out = finish(std::move(u_raw), ctx, p, *p.dirichlet, true);
    out.density = std::move(Q);
    out.mean_correction = ubar;
    out.report = std::move(res.report);
    return out;
}

ScalarSolution solve_ibdl_neumann(const ScalarProblem& p) {
    p.validate();
    if (!p.neumann) throw std::invalid_argument("the Neumann solver needs normal-derivative data");
    if (!(p.k2 > 0.0)) throw std::invalid_argument("the Neumann solver needs k2 > 0");
    // The representation comes from Green's identity for the field cut off at
    // the boundary, so the forcing must be cut off too.
    if (p.extension != Extension::Zero) throw std::invalid_argument("the Neumann solver needs the zero extension");
    ScalarContext ctx(p);
    const std::size_t n = ctx.n_ib();
    LinearOperator op = ibdl_neumann_operator(p);
    const auto& vb = *p.neumann;
    ScalarField single = ctx.coupler().spread(vb);
    const auto trace_single = ctx.coupler().interpolate(ctx.solve(single));
    const auto trace_g = ctx.coupler().interpolate(ctx.solve(ctx.g_ext()));
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = trace_single[i] - trace_g[i];
    KrylovOptions opts = krylov_options(p);
    auto res = gmres(op, rhs, opts);
    const std::vector<double>& ub = res.solution;
    ScalarField forced = ctx.g_ext();
    forced -= ctx.layer_field(ub, 0.0);
    forced -= single;
    ScalarSolution out = finish(ctx.solve(forced), ctx, p, ub, true);
    out.density = ub;
    out.report = std::move(res.report);
    return out;
}

}  // namespace ibdl
