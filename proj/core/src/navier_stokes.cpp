#include "ibdl/navier_stokes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ibdl/fourier.hpp"
#include "ibdl/reference.hpp"

namespace ibdl {

std::string to_string(NSMethod m) { return m == NSMethod::IBDL ? "ibdl" : "ibsl"; }

NSMethod parse_ns_method(const std::string& s) {
    if (s == "ibdl") return NSMethod::IBDL;
    if (s == "ibsl") return NSMethod::IBSL;
    throw std::invalid_argument("unknown method '" + s + "' (expected ibdl or ibsl)");
}

void NSConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(rho > 0.0) || !(mu > 0.0)) throw std::invalid_argument("density and viscosity must be positive");
    if (strip_width < 0) throw std::invalid_argument("strip width must be non-negative");
    if (eta < 0.0) throw std::invalid_argument("eta must be non-negative");
    if (obstacle.size() == 0) throw std::invalid_argument("no obstacle");
    interpolation.validate();
    const double h = grid.h();
    const double strip_right = grid.origin().x + (strip_width - 1) * h;
    const double box_w = control_box.x1 - control_box.x0, box_h = control_box.y1 - control_box.y0;
    if (!(box_w > 0.0) || !(box_h > 0.0)) throw std::invalid_argument("control box is empty");
    for (const Vec2& p : obstacle.points) {
        if (strip_width > 0 && p.x <= strip_right) throw GeometryError("inflow strip reaches the obstacle");
        if (!control_box.contains_strictly(p)) throw GeometryError("control box does not contain the obstacle");
    }
    if (strip_width > 0 && control_box.x0 <= strip_right) throw GeometryError("control box overlaps the inflow strip");
}

NSConfig NSConfig::cylinder(double reynolds, int n, double alpha) {
    NSConfig cfg(PeriodicGrid(n, 8.0, Vec2{0.0, 0.0}));
    const double r = 0.15;
    cfg.reference_length = r;
    cfg.mu = 2.0 * r * cfg.rho * cfg.u_inf / reynolds;
    cfg.obstacle = discretize(ShapeSpec{Circle{{1.85, 4.0}, r}, Orientation::ExteriorIsOmega}, cfg.grid, alpha);
    return cfg;
}

VectorField apply_inflow_strip(VectorField u, const NSConfig& cfg) {
    const int n = u.grid().n();
    const int w = std::min(cfg.strip_width, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < w; ++i) {
            u.u(i, j) = cfg.u_inf;
            u.v(i, j) = 0.0;
        }
    return u;
}

VelocityGradient velocity_gradient(const VectorField& u, DiffScheme scheme) {
    if (scheme == DiffScheme::FiniteDifference)
        return {derivative_x(u.u, scheme), derivative_y(u.u, scheme), derivative_x(u.v, scheme),
                derivative_y(u.v, scheme)};
    // One forward transform per component feeds both derivatives.
    const PeriodicGrid& g = u.grid();
    Symbols sym(g, scheme);
    auto pair = [&](const ScalarField& f) {
        const Spectrum base = fft(f);
        Spectrum dx(base.size()), dy(base.size());
        for (int ky = 0; ky < g.n(); ++ky)
            for (int kx = 0; kx < sym.half(); ++kx) {
                const std::size_t m = sym.mode(kx, ky);
                dx[m] = Complex(0.0, sym.sx(kx)) * base[m];
                dy[m] = Complex(0.0, sym.sy(ky)) * base[m];
            }
        return std::pair{ifft(dx, g), ifft(dy, g)};
    };
    auto [ux, uy] = pair(u.u);
    auto [vx, vy] = pair(u.v);
    return {std::move(ux), std::move(uy), std::move(vx), std::move(vy)};
}

namespace {

int grid_line(double coord, double origin, double h, int n, const char* what) {
    const double s = (coord - origin) / h;
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s)))
        throw GeometryError(std::string("control box ") + what + " edge is not on a grid line");
    (void)n;
    return static_cast<int>(r);
}

// Trapezoid weight of index k on [k0, k1].
double trap(int k, int k0, int k1) { return (k == k0 || k == k1) ? 0.5 : 1.0; }

}  // namespace

Vec2 control_box_force(const VectorField& u_new, const VectorField& u_now, const VectorField& u_prev,
                       const ScalarField& pressure, const IndicatorMask& mask, const NSConfig& cfg, bool bootstrap,
                       const VelocityGradient* gradient_of_new) {
    const PeriodicGrid& g = u_new.grid();
    const int n = g.n();
    const double h = g.h();
    const Box& box = cfg.control_box;
    for (const Vec2& p : cfg.obstacle.points)
        if (!box.contains_strictly(p)) throw GeometryError("control box intersects the boundary");
    const int i0 = grid_line(box.x0, g.origin().x, h, n, "left");
    const int i1 = grid_line(box.x1, g.origin().x, h, n, "right");
    const int j0 = grid_line(box.y0, g.origin().y, h, n, "bottom");
    const int j1 = grid_line(box.y1, g.origin().y, h, n, "top");

    std::optional<VelocityGradient> own;
    if (!gradient_of_new) own = velocity_gradient(u_new, cfg.scheme);
    const VelocityGradient& grad = gradient_of_new ? *gradient_of_new : *own;
    const ScalarField &ux = grad.ux, &uy = grad.uy, &vx = grad.vx, &vy = grad.vy;
    const double mu = cfg.mu, rho = cfg.rho;
    auto at = [&](const ScalarField& f, int i, int j) { return f.values[g.index(g.wrap(i), g.wrap(j))]; };
    // Momentum flux (sigma - rho u u^T) applied to an outward normal.
    auto flux = [&](int i, int j, Vec2 nr) {
        const double p = at(pressure, i, j);
        const double u = at(u_new.u, i, j), v = at(u_new.v, i, j);
        const double sxx = -p + 2.0 * mu * at(ux, i, j) - rho * u * u;
        const double syy = -p + 2.0 * mu * at(vy, i, j) - rho * v * v;
        const double sxy = mu * (at(uy, i, j) + at(vx, i, j)) - rho * u * v;
        return Vec2{sxx * nr.x + sxy * nr.y, sxy * nr.x + syy * nr.y};
    };
    Vec2 edges{};
    for (int i = i0; i <= i1; ++i) {
        const double w = trap(i, i0, i1) * h;
        edges += w * flux(i, j0, {0.0, -1.0});
        edges += w * flux(i, j1, {0.0, 1.0});
    }
    for (int j = j0; j <= j1; ++j) {
        const double w = trap(j, j0, j1) * h;
        edges += w * flux(i0, j, {-1.0, 0.0});
        edges += w * flux(i1, j, {1.0, 0.0});
    }
    Vec2 inertia{};
    const double inv = 1.0 / cfg.dt;
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
            const std::size_t k = g.index(g.wrap(i), g.wrap(j));
            if (!mask.inside[k]) continue;
            double ut, vt;
            if (bootstrap) {
                ut = (u_new.u.values[k] - u_now.u.values[k]) * inv;
                vt = (u_new.v.values[k] - u_now.v.values[k]) * inv;
            } else {
                ut = (3.0 * u_new.u.values[k] - 4.0 * u_now.u.values[k] + u_prev.u.values[k]) * 0.5 * inv;
                vt = (3.0 * u_new.v.values[k] - 4.0 * u_now.v.values[k] + u_prev.v.values[k]) * 0.5 * inv;
            }
            const double w = trap(i, i0, i1) * trap(j, j0, j1) * h * h;
            inertia += Vec2{w * rho * ut, w * rho * vt};
        }
    return edges - inertia;
}

NavierStokesStepper::NavierStokesStepper(NSConfig cfg) : cfg_(std::move(cfg)), mask_(cfg_.grid) {
    cfg_.validate();
    mask_ = compute_indicator(cfg_.obstacle, cfg_.grid, cfg_.kernel, cfg_.scheme,
                              cfg_.interpolation.band(cfg_.grid.n()));
}

NSState NavierStokesStepper::initial_state() const {
    VectorField zero(cfg_.grid);
    VectorField start = apply_inflow_strip(zero, cfg_);
    return NSState{start, start, 0.0, 0};
}

VectorField NavierStokesStepper::advection(const VectorField& u, const VelocityGradient& d) const {
    VectorField out(cfg_.grid);
    if (!cfg_.nonlinear) return out;
    for (std::size_t k = 0; k < out.u.values.size(); ++k) {
        const double uu = u.u.values[k], vv = u.v.values[k];
        out.u.values[k] = uu * d.ux.values[k] + vv * d.uy.values[k];
        out.v.values[k] = uu * d.vx.values[k] + vv * d.vy.values[k];
    }
    return out;
}

FluidProblem NavierStokesStepper::brinkman_problem(double k2) const {
    FluidProblem p(cfg_.grid);
    p.boundary = cfg_.obstacle;
    p.mu = cfg_.mu;
    p.k2 = k2;
    p.eta = cfg_.method == NSMethod::IBDL ? cfg_.eta : 0.0;
    p.scheme = cfg_.scheme;
    p.kernel = cfg_.kernel;
    p.interpolation = cfg_.interpolation;
    p.tolerance = cfg_.tolerance;
    p.extension = Extension::Smooth;
    p.interior = false;
    p.ub_x.assign(cfg_.obstacle.size(), 0.0);
    p.ub_y.assign(cfg_.obstacle.size(), 0.0);
    return p;
}

NSState NavierStokesStepper::step(const NSState& s, StepRecord* record) {
    const bool bootstrap = s.step_index == 0;
    const double rho = cfg_.rho, dt = cfg_.dt;
    if (!grad_now_ || grad_step_ != s.step_index) {
        grad_now_ = velocity_gradient(s.u_now, cfg_.scheme);
        grad_step_ = s.step_index;
    }
    VectorField adv_now = advection(s.u_now, *grad_now_);

    FluidProblem p = brinkman_problem(bootstrap ? rho / dt : 1.5 * rho / dt);
    p.mask = mask_;
    VectorField rhs(cfg_.grid);
    if (bootstrap) {
        for (std::size_t k = 0; k < rhs.u.values.size(); ++k) {
            rhs.u.values[k] = rho * (-s.u_now.u.values[k] / dt + adv_now.u.values[k]);
            rhs.v.values[k] = rho * (-s.u_now.v.values[k] / dt + adv_now.v.values[k]);
        }
    } else {
        VectorField adv_prev = (prev_advection_ && prev_advection_step_ == s.step_index - 1)
                                   ? *prev_advection_
                                   : advection(s.u_prev, velocity_gradient(s.u_prev, cfg_.scheme));
        const double c = 0.5 / dt;
        for (std::size_t k = 0; k < rhs.u.values.size(); ++k) {
            rhs.u.values[k] = rho * ((-4.0 * s.u_now.u.values[k] + s.u_prev.u.values[k]) * c +
                                     2.0 * adv_now.u.values[k] - adv_prev.u.values[k]);
            rhs.v.values[k] = rho * ((-4.0 * s.u_now.v.values[k] + s.u_prev.v.values[k]) * c +
                                     2.0 * adv_now.v.values[k] - adv_prev.v.values[k]);
        }
        if (cfg_.method == NSMethod::IBDL && cfg_.cache_boundary_operator && !cached_operator_) {
            auto dense = std::make_shared<DenseMatrix>(assemble_dense(ibdl_fluid_operator(p)));
            cached_operator_ = std::make_shared<const LinearOperator>(
                LinearOperator{dense->rows, [dense](std::span<const double> x, std::span<double> y) {
                                   const std::size_t n = dense->rows;
                                   for (std::size_t i = 0; i < n; ++i) {
                                       const double* row = dense->data.data() + i * n;
                                       double acc = 0.0;
                                       for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
                                       y[i] = acc;
                                   }
                               }});
        }
        p.operator_override = cached_operator_;
    }
    p.rhs = std::move(rhs);
    if (cfg_.method == NSMethod::IBDL && last_ && !last_->unknowns.empty()) p.initial_guess = last_->unknowns;

    FluidSolution sol = cfg_.method == NSMethod::IBDL ? solve_ibdl_fluid(p) : solve_ibsl_brinkman(p);
    if (!sol.report.converged)
        throw std::runtime_error("Krylov solve failed at step " + std::to_string(s.step_index + 1) + ": " +
                                 sol.report.message);

    NSState next{apply_inflow_strip(sol.velocity, cfg_), s.u_now, s.time + dt, s.step_index + 1};
    VelocityGradient grad_next = velocity_gradient(next.u_now, cfg_.scheme);
    if (record) {
        const Vec2 force = control_box_force(next.u_now, s.u_now, s.u_prev, sol.pressure, mask_, cfg_, bootstrap,
                                             &grad_next);
        const double scale = rho * cfg_.u_inf * cfg_.u_inf * cfg_.reference_length;
        record->step = next.step_index;
        record->time = next.time;
        record->drag = force.x / scale;
        record->lift = force.y / scale;
        record->iterations = sol.report.iterations;
        record->converged = sol.report.converged;
        record->divergence_residual = divergence_residual(sol.velocity_raw, sol.source, cfg_.scheme);
        record->max_velocity = next.u_now.max_abs();
    }
    prev_advection_ = std::move(adv_now);
    prev_advection_step_ = s.step_index;
    grad_now_ = std::move(grad_next);
    grad_step_ = next.step_index;
    last_ = std::move(sol);
    return next;
}

NSState imex_step(const NSState& s, const NSConfig& cfg) {
    NavierStokesStepper stepper(cfg);
    return stepper.step(s);
}

TimeSeries run_navier_stokes(NavierStokesStepper& stepper, NSState& state, int steps,
                             const std::function<bool(const StepRecord&, const NSState&)>& on_step) {
    TimeSeries series;
    series.records.reserve(static_cast<std::size_t>(std::max(steps, 0)));
    for (int k = 0; k < steps; ++k) {
        StepRecord rec;
        state = stepper.step(state, &rec);
        series.records.push_back(rec);
        if (on_step && !on_step(rec, state)) break;
    }
    return series;
}

double strouhal(std::span<const double> time, std::span<const double> lift, double u_inf, double reference_length) {
    if (time.size() != lift.size()) throw std::invalid_argument("time and lift lengths differ");
    if (lift.size() < 3) throw std::runtime_error("no peaks: series too short");
    // Round-off wiggles in a symmetric flow are not shedding.
    const auto [lo, hi] = std::minmax_element(lift.begin(), lift.end());
    if (*hi - *lo <= 1e-9 * std::max({1.0, std::abs(*hi), std::abs(*lo)}))
        throw std::runtime_error("no peaks: the lift history is flat to round-off");
    std::vector<double> sorted(lift.begin(), lift.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];
    std::vector<double> peaks;
    for (std::size_t k = 1; k + 1 < lift.size(); ++k) {
        if (!(lift[k] > lift[k - 1] && lift[k] > lift[k + 1] && lift[k] > median)) continue;
        // Vertex of the parabola through the three samples (uniform spacing assumed locally).
        const double a = lift[k - 1], b = lift[k], c = lift[k + 1];
        const double denom = a - 2.0 * b + c;
        const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
        const double dt = 0.5 * (time[k + 1] - time[k - 1]);
        peaks.push_back(time[k] + shift * dt);
    }
    if (peaks.empty()) throw std::runtime_error("no peaks in the lift history");
    if (peaks.size() < 3) throw std::runtime_error("fewer than three lift peaks");
    const double period = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
    return 2.0 * reference_length / (period * u_inf);
}

double mean_drag(const TimeSeries& series, double t0, double t1) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : series.records)
        if (r.time >= t0 && r.time <= t1) {
            sum += r.drag;
            ++count;
        }
    if (count == 0) throw std::runtime_error("no records in the averaging window");
    return sum / count;
}

}  // namespace ibdl
