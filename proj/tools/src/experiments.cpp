#include "ibdl_tools/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "ibdl/fluid_solvers.hpp"
#include "ibdl/navier_stokes.hpp"
#include "ibdl/reference.hpp"
#include "ibdl/scalar_solvers.hpp"

namespace ibdl::tools {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

// Runs body(i) for i in [0, count). Each index writes only its own slot, so
// the results do not depend on the thread count.
template <class Body>
void for_each_row(std::size_t count, int threads, Body body) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

class Logger {
public:
    explicit Logger(std::ostream* out) : out_(out) {}
    void line(const std::string& s) {
        if (!out_) return;
        std::lock_guard lock(m_);
        *out_ << s << std::endl;
    }

private:
    std::ostream* out_;
    std::mutex m_;
};

DiffScheme scheme_of(const RunConfig& c) { return parse_scheme(c.discretization.scheme); }
CouplingKernel kernel_of(const RunConfig& c) { return CouplingKernel{parse_kernel(c.discretization.kernel)}; }
Stencil stencil_of(const RunConfig& c) {
    return c.discretization.stencil == "wide" ? Stencil::Wide : Stencil::Standard5;
}
Orientation orientation_of(const RunConfig& c) {
    return c.problem.omega == "exterior" ? Orientation::ExteriorIsOmega : Orientation::InteriorIsOmega;
}

InterpolationConfig interpolation_of(const RunConfig& c) {
    const auto& s = c.discretization.interpolation;
    if (s.policy == "log-growth") return InterpolationConfig::log_growth(s.growth);
    return InterpolationConfig::fixed(s.m1, s.m2);
}

ShapeSpec shape_spec(const ShapeConfig& s, Orientation o) {
    const Vec2 c{s.center[0], s.center[1]};
    if (s.type == "circle") return {Circle{c, s.radius}, o};
    if (s.type == "ellipse") return {Ellipse{c, s.semi_a, s.semi_b, s.rotation}, o};
    if (s.type == "starfish") return {Starfish{c, s.scale}, o};
    return {read_point_list(s.file), o};
}

Vec2 box_center(const PeriodicGrid& g) {
    return {g.origin().x + 0.5 * g.length(), g.origin().y + 0.5 * g.length()};
}

struct Sweep {
    std::string method;
    double alpha = 0.0;
    double eta = 0.0;
    int n = 0;
    double area = kNaN;  // drag sweeps over circle areas only
};

std::vector<Sweep> sweep_rows(const RunConfig& c, bool with_areas) {
    std::vector<Sweep> rows;
    for (const auto& m : c.methods)
        for (double a : c.alphas)
            for (double eta : c.etas) {
                if (with_areas && !c.drag.areas.empty()) {
                    for (double area : c.drag.areas)
                        for (int n : c.grids) rows.push_back({m, a, eta, n, area});
                } else {
                    for (int n : c.grids) rows.push_back({m, a, eta, n});
                }
            }
    return rows;
}

std::string describe(const Sweep& s) {
    std::string d = s.method + " alpha=" + fmt("%g", s.alpha) + " eta=" + fmt("%g", s.eta);
    if (!std::isnan(s.area)) d += " c=" + fmt("%g", s.area);
    return d + " N=" + std::to_string(s.n);
}

std::string status_of(const SolveReport& r) {
    return r.converged ? "ok" : "not-converged: " + (r.message.empty() ? std::string("iteration cap") : r.message);
}

// Outcome of one boundary solve with its error measures (NaN when absent).
struct RowResult {
    std::string status = "error: not run";
    long long n_ib = 0;
    long long iterations = -1;
    std::vector<double> values;
};

// ---------------------------------------------------------------- scalar

std::vector<std::string> scalar_error_columns(const RunConfig& c) {
    std::vector<std::string> cols{"l1", "l2", "linf"};
    if (c.problem.equation == Equation::Neumann) {
        cols.push_back("boundary_l1");
        cols.push_back("boundary_linf");
    }
    return cols;
}

RowResult run_scalar(const RunConfig& c, const Sweep& s, bool measure) {
    RowResult out;
    const auto& pc = c.problem;
    const PeriodicGrid g = make_grid(c, s.n);
    ScalarProblem p(g);
    p.boundary = make_boundary(c, g, s.alpha);
    out.n_ib = static_cast<long long>(p.boundary.size());
    const bool poisson = pc.equation == Equation::Poisson;
    p.k2 = poisson ? 0.0 : pc.k2;
    const ScalarExact exact = scalar_exact(parse_analytic_kind(pc.solution), pc.solution_length, p.k2);
    p.rhs = sample_field(g, exact.forcing);
    p.extension = parse_extension(pc.extension);
    p.scheme = scheme_of(c);
    p.kernel = kernel_of(c);
    p.eta = s.eta;
    p.interpolation = interpolation_of(c);
    p.tolerance = c.discretization.tolerance;
    p.max_iterations = c.discretization.max_iterations;
    std::vector<double> exact_trace = boundary_trace(p.boundary, exact.value);
    if (pc.equation == Equation::Neumann) {
        std::vector<double> flux(p.boundary.size());
        for (std::size_t i = 0; i < flux.size(); ++i)
            flux[i] = dot(exact.gradient(p.boundary.points[i]), p.boundary.normals[i]);
        p.neumann = std::move(flux);
    } else {
        p.dirichlet = exact_trace;
    }

    auto solve = [&] {
        if (pc.equation == Equation::Neumann) return solve_ibdl_neumann(p);
        if (s.method == "ibdl") return solve_ibdl_scalar(p);
        return p.k2 > 0.0 ? solve_ibsl_helmholtz(p) : solve_ibsl_poisson(p);
    };
    const ScalarSolution sol = solve();

    out.iterations = sol.report.iterations;
    out.status = status_of(sol.report);
    out.values.assign(scalar_error_columns(c).size(), kNaN);
    if (!measure) return out;

    const ScalarField err = sol.u - sample_field(g, exact.value);
    std::vector<unsigned char> region = sol.mask.inside;
    if (c.errors.exclude_band)
        for (std::size_t k = 0; k < region.size(); ++k)
            if (sol.mask.near_boundary[k]) region[k] = 0;
    const Norms nm = masked_norms(err, region);
    out.values[0] = nm.l1;
    out.values[1] = nm.l2;
    out.values[2] = nm.linf;
    if (pc.equation == Equation::Neumann) {
        double sum = 0.0, worst = 0.0;
        for (std::size_t i = 0; i < exact_trace.size(); ++i) {
            const double e = std::abs(sol.density[i] - exact_trace[i]);
            sum += e;
            worst = std::max(worst, e);
        }
        out.values[3] = sum / static_cast<double>(exact_trace.size());
        out.values[4] = worst;
    }
    if (!sol.u.all_finite()) out.status = "error: non-finite solution";
    return out;
}

// ---------------------------------------------------------------- fluid

FluidProblem fluid_problem(const RunConfig& c, const PeriodicGrid& g, ImmersedBoundary b, double eta,
                           const FlowExact* exact) {
    const auto& pc = c.problem;
    FluidProblem p(g);
    p.boundary = std::move(b);
    p.mu = pc.mu;
    p.k2 = pc.equation == Equation::Stokes ? 0.0 : pc.k2;
    p.eta = eta;
    p.scheme = scheme_of(c);
    p.stencil = stencil_of(c);
    p.kernel = kernel_of(c);
    p.interpolation = interpolation_of(c);
    p.tolerance = c.discretization.tolerance;
    p.max_iterations = c.discretization.max_iterations;
    p.extension = parse_extension(pc.extension);
    p.interior = pc.omega == "interior";
    const std::size_t m = p.boundary.size();
    p.ub_x.assign(m, 0.0);
    p.ub_y.assign(m, 0.0);
    if (exact) {
        p.rhs = sample_field(g, exact->forcing);
        for (std::size_t i = 0; i < m; ++i) {
            const Vec2 v = exact->velocity(p.boundary.points[i]);
            p.ub_x[i] = v.x;
            p.ub_y[i] = v.y;
        }
    } else {
        for (auto& v : p.rhs.u.values) v = pc.forcing[0];
        for (auto& v : p.rhs.v.values) v = pc.forcing[1];
    }
    return p;
}

FluidSolution solve_fluid(const FluidProblem& p, const std::string& method) {
    if (method == "ibdl") return solve_ibdl_fluid(p);
    return p.k2 > 0.0 ? solve_ibsl_brinkman(p) : solve_ibsl_stokes(p);
}

const std::vector<std::string> kFluidErrors{"velocity_l1", "velocity_l2", "velocity_linf",
                                            "pressure_l1", "pressure_l2", "pressure_linf"};

RowResult run_fluid(const RunConfig& c, const Sweep& s, bool measure) {
    RowResult out;
    const auto& pc = c.problem;
    const PeriodicGrid g = make_grid(c, s.n);
    const double k2 = pc.equation == Equation::Stokes ? 0.0 : pc.k2;
    const FlowExact exact = flow_exact(parse_flow_kind(pc.solution), pc.mu, k2, pc.wavenumber);
    const FluidProblem p = fluid_problem(c, g, make_boundary(c, g, s.alpha), s.eta, &exact);
    out.n_ib = static_cast<long long>(p.boundary.size());
    const FluidSolution sol = solve_fluid(p, s.method);
    out.iterations = sol.report.iterations;
    out.status = status_of(sol.report);
    out.values.assign(kFluidErrors.size() + 1, kNaN);
    out.values.back() = divergence_residual(sol.velocity_raw, sol.source, p.scheme);
    if (!measure) return out;

    std::vector<unsigned char> region = sol.mask.inside;
    if (c.errors.exclude_band)
        for (std::size_t k = 0; k < region.size(); ++k)
            if (sol.mask.near_boundary[k]) region[k] = 0;
    ScalarField verr(g);
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            const Vec2 ue = exact.velocity(g.node(i, j));
            verr(i, j) = std::hypot(sol.velocity.u(i, j) - ue.x, sol.velocity.v(i, j) - ue.y);
        }
    const Norms vn = masked_norms(verr, region);

    // Pressure is compared away from the boundary after removing the mean
    // offset over the comparison region.
    std::vector<unsigned char> pregion = sol.mask.inside;
    if (c.errors.pressure_offset > 0.0) {
        const DistanceField dist =
            polyline_distance_field(p.boundary, g, c.errors.pressure_offset + 2.0 * g.h());
        for (std::size_t k = 0; k < pregion.size(); ++k)
            if (dist.distance[k] < c.errors.pressure_offset) pregion[k] = 0;
    }
    ScalarField perr(g);
    double offset = 0.0;
    std::size_t count = 0;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            perr(i, j) = sol.pressure(i, j) - exact.pressure(g.node(i, j));
            if (pregion[g.index(i, j)]) {
                offset += perr(i, j);
                ++count;
            }
        }
    if (count > 0) {
        offset /= static_cast<double>(count);
        for (auto& v : perr.values) v -= offset;
        const Norms pn = masked_norms(perr, pregion);
        out.values[3] = pn.l1;
        out.values[4] = pn.l2;
        out.values[5] = pn.linf;
    }
    out.values[0] = vn.l1;
    out.values[1] = vn.l2;
    out.values[2] = vn.linf;
    if (!sol.velocity.u.all_finite() || !sol.velocity.v.all_finite()) out.status = "error: non-finite solution";
    return out;
}

// ---------------------------------------------------------------- tables

Table runs_table(const std::string& name, const std::string& what, const std::vector<std::string>& value_cols,
                 bool with_area = false) {
    Table t;
    t.name = name;
    t.description = what;
    t.columns = {{"method", "string", "ibdl or ibsl"},
                 {"alpha", "float", "boundary point spacing over meshwidth"},
                 {"eta", "float", "single-layer completion weight"}};
    if (with_area) t.columns.push_back({"area", "float", "obstacle area c (NaN when the shapes are used as given)"});
    t.columns.push_back({"n", "int", "grid points per side"});
    t.columns.push_back({"n_ib", "int", "boundary points"});
    t.columns.push_back({"iterations", "int", "Krylov iterations (-1 when the solve did not run)"});
    t.columns.push_back({"status", "string", "ok, not-converged: ..., or error: ..."});
    for (const auto& v : value_cols) t.columns.push_back({v, "float", ""});
    return t;
}

void describe_columns(Table& t, const std::vector<std::pair<std::string, std::string>>& docs) {
    for (auto& col : t.columns)
        for (const auto& [name, text] : docs)
            if (col.name == name) col.description = text;
}

const std::vector<std::pair<std::string, std::string>> kValueDocs{
    {"l1", "mean absolute error over the evaluation region"},
    {"l2", "root mean square error over the evaluation region"},
    {"linf", "largest absolute error over the evaluation region"},
    {"boundary_l1", "mean absolute error of the recovered boundary values"},
    {"boundary_linf", "largest absolute error of the recovered boundary values"},
    {"velocity_l1", "mean Euclidean velocity error over the evaluation region"},
    {"velocity_l2", "root mean square Euclidean velocity error"},
    {"velocity_linf", "largest Euclidean velocity error"},
    {"pressure_l1", "mean absolute pressure error (mean offset removed) away from the boundary"},
    {"pressure_l2", "root mean square pressure error away from the boundary"},
    {"pressure_linf", "largest absolute pressure error away from the boundary"},
    {"divergence", "largest discrete divergence residual of the raw velocity"},
    {"flux", "mean horizontal velocity across the left edge of the box"},
    {"force_x", "net force on the obstacles, x component"},
    {"force_y", "net force on the obstacles, y component"},
    {"drag", "dimensionless drag force_x / (mu flux)"},
};

Table orders_table(const std::string& name, const Table& runs, const std::vector<std::string>& value_cols) {
    Table t;
    t.name = name;
    t.description = "observed convergence orders between consecutive grids and over the whole sequence";
    t.columns = {{"method", "string", "ibdl or ibsl"},
                 {"alpha", "float", "boundary point spacing over meshwidth"},
                 {"eta", "float", "single-layer completion weight"},
                 {"span", "string", "pair for consecutive grids, overall for first to last"},
                 {"n_coarse", "int", "coarse grid size"},
                 {"n_fine", "int", "fine grid size"}};
    for (const auto& v : value_cols)
        t.columns.push_back({"order_" + v, "float", "log2(e_coarse/e_fine) / log2(n_fine/n_coarse) for " + v});

    // Rows of one (method, alpha, eta) group are contiguous and ordered by n.
    std::size_t start = 0;
    while (start < runs.rows.size()) {
        std::size_t stop = start + 1;
        auto key = [&](std::size_t r) {
            return runs.text(r, "method") + "|" + runs.text(r, "alpha") + "|" + runs.text(r, "eta");
        };
        while (stop < runs.rows.size() && key(stop) == key(start)) ++stop;
        auto add = [&](std::size_t a, std::size_t b, const char* span) {
            std::vector<Cell> row{runs.rows[a][0], runs.rows[a][1], runs.rows[a][2], std::string(span),
                                  static_cast<long long>(runs.number(a, "n")),
                                  static_cast<long long>(runs.number(b, "n"))};
            for (const auto& v : value_cols) {
                const bool ok = runs.text(a, "status") == "ok" && runs.text(b, "status") == "ok";
                row.emplace_back(ok ? observed_order(runs.number(a, v), runs.number(b, v),
                                                     static_cast<int>(runs.number(a, "n")),
                                                     static_cast<int>(runs.number(b, "n")))
                                    : kNaN);
            }
            t.add_row(std::move(row));
        };
        for (std::size_t r = start; r + 1 < stop; ++r) add(r, r + 1, "pair");
        if (stop - start > 2) add(start, stop - 1, "overall");
        start = stop;
    }
    return t;
}

std::string pivot_label(const Sweep& s, const RunConfig& c) {
    std::string label = s.method + "_a" + fmt("%g", s.alpha);
    if (c.etas.size() > 1) label += "_eta" + fmt("%g", s.eta);
    return label;
}

Table pivot_table(const RunConfig& c, const std::vector<Sweep>& rows, const std::vector<RowResult>& results) {
    Table t;
    t.name = "iteration_table";
    t.description = "Krylov iterations, one row per grid and one column per method and spacing ratio";
    t.columns = {{"n", "int", "grid points per side"}};
    std::vector<std::string> labels;
    for (const auto& s : rows) {
        const std::string l = pivot_label(s, c);
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    }
    for (const auto& l : labels)
        t.columns.push_back({l, "int", "iterations (-1 when the solve failed or did not converge)"});
    for (int n : c.grids) {
        std::vector<Cell> row{static_cast<long long>(n)};
        for (const auto& l : labels) {
            long long it = -1;
            for (std::size_t r = 0; r < rows.size(); ++r)
                if (rows[r].n == n && pivot_label(rows[r], c) == l && results[r].status == "ok")
                    it = results[r].iterations;
            row.emplace_back(it);
        }
        t.add_row(std::move(row));
    }
    return t;
}

template <class Solve>
std::vector<RowResult> run_rows(const std::vector<Sweep>& rows, const RunOptions& o, Solve solve) {
    std::vector<RowResult> results(rows.size());
    Logger log(o.log);
    std::atomic<int> done{0};
    for_each_row(rows.size(), o.threads, [&](std::size_t i) {
        const auto t0 = Clock::now();
        try {
            results[i] = solve(rows[i]);
        } catch (const std::exception& e) {
            results[i].status = std::string("error: ") + e.what();
        }
        log.line("[" + std::to_string(++done) + "/" + std::to_string(rows.size()) + "] " + describe(rows[i]) + ": " +
                 results[i].status + ", " + std::to_string(results[i].iterations) + " iterations, " +
                 fmt("%.2f", seconds_since(t0)) + " s");
    });
    return results;
}

int count_failures(const std::vector<RowResult>& results) {
    int f = 0;
    for (const auto& r : results) f += r.status != "ok";
    return f;
}

void fill_runs(Table& t, const std::vector<Sweep>& rows, const std::vector<RowResult>& results, bool with_area) {
    const std::size_t fixed = with_area ? 8 : 7;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<Cell> row{rows[r].method, rows[r].alpha, rows[r].eta};
        if (with_area) row.emplace_back(rows[r].area);
        row.emplace_back(static_cast<long long>(rows[r].n));
        row.emplace_back(results[r].n_ib);
        row.emplace_back(results[r].iterations);
        row.emplace_back(results[r].status);
        std::vector<double> values = results[r].values;
        values.resize(t.columns.size() - fixed, kNaN);
        for (double v : values) row.emplace_back(v);
        t.add_row(std::move(row));
    }
}

ExperimentResult refine(const RunConfig& c, const RunOptions& o, bool fluid, bool measure) {
    ExperimentResult res;
    const auto rows = sweep_rows(c, false);
    std::vector<std::string> cols = fluid ? kFluidErrors : scalar_error_columns(c);
    auto results = run_rows(rows, o, [&](const Sweep& s) {
        return fluid ? run_fluid(c, s, measure) : run_scalar(c, s, measure);
    });
    std::vector<std::string> table_cols = cols;
    if (fluid) table_cols.push_back("divergence");
    Table runs = runs_table("runs", "one boundary solve per method, spacing ratio, eta and grid", table_cols);
    describe_columns(runs, kValueDocs);
    fill_runs(runs, rows, results, false);
    res.failures = count_failures(results);
    if (measure) {
        res.tables.push_back(runs);
        res.tables.push_back(orders_table("orders", runs, cols));
    } else {
        res.tables.push_back(pivot_table(c, rows, results));
        res.tables.push_back(runs);
    }
    return res;
}

// ---------------------------------------------------------------- drag

struct DragRow {
    RowResult result;
    std::vector<ForceTorque> per_curve;
};

ImmersedBoundary curve_slice(const ImmersedBoundary& b, std::size_t curve) {
    ImmersedBoundary part;
    const std::size_t s = b.curve_begin(curve), e = b.curve_end(curve);
    part.points.assign(b.points.begin() + s, b.points.begin() + e);
    part.weights.assign(b.weights.begin() + s, b.weights.begin() + e);
    part.normals.assign(b.normals.begin() + s, b.normals.begin() + e);
    part.closed = b.closed;
    return part;
}

DragRow run_drag(const RunConfig& c, const Sweep& s) {
    DragRow out;
    const PeriodicGrid g = make_grid(c, s.n);
    ImmersedBoundary b;
    if (!std::isnan(s.area)) {
        const double r = std::sqrt(s.area / std::numbers::pi);
        b = discretize(ShapeSpec{Circle{box_center(g), r}, Orientation::ExteriorIsOmega}, g, s.alpha);
    } else {
        b = make_boundary(c, g, s.alpha);
    }
    const FluidProblem p = fluid_problem(c, g, std::move(b), s.eta, nullptr);
    out.result.n_ib = static_cast<long long>(p.boundary.size());
    const FluidSolution sol = solve_fluid(p, s.method);
    out.result.iterations = sol.report.iterations;
    out.result.status = status_of(sol.report);

    double flux = 0.0;
    for (int j = 0; j < g.n(); ++j) flux += sol.velocity.u(0, j);
    flux /= g.n();
    const ForceMethod fm = s.method == "ibdl" ? ForceMethod::CompletedDoubleLayer : ForceMethod::SingleLayer;
    const ForceTorque total = net_force_torque(sol.density_x, sol.density_y, p.boundary, fm, s.eta);
    out.result.values = {flux, total.force.x, total.force.y, total.force.x / (c.problem.mu * flux),
                         divergence_residual(sol.velocity_raw, sol.source, p.scheme)};
    for (std::size_t k = 0; k < p.boundary.curve_count(); ++k) {
        const ImmersedBoundary part = curve_slice(p.boundary, k);
        const std::size_t s0 = p.boundary.curve_begin(k), s1 = p.boundary.curve_end(k);
        Vec2 centroid{};
        for (const Vec2& x : part.points) centroid += x;
        centroid = (1.0 / static_cast<double>(part.size())) * centroid;
        const std::span<const double> dx(sol.density_x.data() + s0, s1 - s0);
        const std::span<const double> dy(sol.density_y.data() + s0, s1 - s0);
        out.per_curve.push_back(net_force_torque(dx, dy, part, fm, s.eta, centroid));
    }
    return out;
}

ExperimentResult drag_sweep(const RunConfig& c, const RunOptions& o) {
    ExperimentResult res;
    const auto rows = sweep_rows(c, true);
    std::vector<DragRow> drags(rows.size());
    auto results = run_rows(rows, o, [&](const Sweep& s) {
        drags[&s - rows.data()] = run_drag(c, s);
        return drags[&s - rows.data()].result;
    });
    const std::vector<std::string> cols{"flux", "force_x", "force_y", "drag", "divergence"};
    Table runs = runs_table("drag", "net force and dimensionless drag per obstacle configuration", cols, true);
    describe_columns(runs, kValueDocs);
    fill_runs(runs, rows, results, true);
    res.tables.push_back(runs);

    Table curves;
    curves.name = "forces";
    curves.description = "net force and torque on each closed curve";
    curves.columns = {{"method", "string", "ibdl or ibsl"},
                      {"alpha", "float", "boundary point spacing over meshwidth"},
                      {"eta", "float", "single-layer completion weight"},
                      {"area", "float", "obstacle area c (NaN when the shapes are used as given)"},
                      {"n", "int", "grid points per side"},
                      {"curve", "int", "curve index in input order"},
                      {"force_x", "float", "force on the curve, x component"},
                      {"force_y", "float", "force on the curve, y component"},
                      {"torque", "float", "torque about the curve's point centroid"}};
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t k = 0; k < drags[r].per_curve.size(); ++k) {
            const auto& ft = drags[r].per_curve[k];
            curves.add_row({rows[r].method, rows[r].alpha, rows[r].eta, rows[r].area, static_cast<long long>(rows[r].n),
                            static_cast<long long>(k), ft.force.x, ft.force.y, ft.torque});
        }
    res.tables.push_back(curves);
    res.failures = count_failures(results);
    return res;
}

// ---------------------------------------------------------------- Navier-Stokes

NSConfig ns_config(const RunConfig& c) {
    const auto& n = c.ns;
    const PeriodicGrid g = make_grid(c, c.grids.front());
    NSConfig cfg(g);
    RunConfig ext = c;
    ext.problem.omega = "exterior";
    cfg.obstacle = make_boundary(ext, g, c.alphas.front());
    cfg.reference_length = n.reference_length ? *n.reference_length : c.problem.shapes.front().radius;
    cfg.rho = n.rho;
    cfg.u_inf = n.u_inf;
    cfg.mu = 2.0 * cfg.reference_length * n.rho * n.u_inf / n.reynolds;
    cfg.dt = n.dt;
    cfg.strip_width = n.strip_width;
    cfg.eta = c.etas.front();
    cfg.interpolation = interpolation_of(c);
    cfg.method = parse_ns_method(c.methods.front());
    cfg.control_box = Box{n.control_box[0], n.control_box[1], n.control_box[2], n.control_box[3]};
    cfg.scheme = scheme_of(c);
    cfg.kernel = kernel_of(c);
    cfg.tolerance = c.discretization.tolerance;
    cfg.nonlinear = n.nonlinear;
    cfg.cache_boundary_operator = n.cache_operator;
    return cfg;
}

ExperimentResult ns_run(const RunConfig& c, const RunOptions& o) {
    ExperimentResult res;
    const auto& n = c.ns;
    Logger log(o.log);
    NavierStokesStepper stepper(ns_config(c));
    NSState state = stepper.initial_state();
    const int steps = n.steps ? *n.steps : static_cast<int>(std::ceil(*n.t_end / n.dt - 1e-9));
    const bool snapshots = c.output.snapshots && n.snapshot_every > 0 && !o.output_dir.empty();

    Table series;
    series.name = "series";
    series.description = "per-step force coefficients and solver diagnostics";
    series.columns = {{"step", "int", "completed steps"},
                      {"time", "float", "simulation time after the step"},
                      {"drag", "float", "drag coefficient from the control-box momentum balance"},
                      {"lift", "float", "lift coefficient (transverse force, same normalisation)"},
                      {"iterations", "int", "Krylov iterations of the step's boundary solve"},
                      {"divergence", "float", "largest discrete divergence residual"},
                      {"max_velocity", "float", "largest velocity component magnitude"}};
    std::string failure;
    const auto t0 = Clock::now();
    try {
        run_navier_stokes(stepper, state, steps, [&](const StepRecord& r, const NSState& s) {
            series.add_row({static_cast<long long>(r.step), r.time, r.drag, r.lift,
                            static_cast<long long>(r.iterations), r.divergence_residual, r.max_velocity});
            if (n.progress_every > 0 && r.step % n.progress_every == 0)
                log.line("step " + std::to_string(r.step) + " t=" + fmt("%.4f", r.time) + " drag=" +
                         fmt("%.5f", r.drag) + " lift=" + fmt("%.5f", r.lift) + " iterations=" +
                         std::to_string(r.iterations) + " (" + fmt("%.1f", seconds_since(t0)) + " s)");
            if (snapshots && r.step % n.snapshot_every == 0) {
                char stem[32];
                std::snprintf(stem, sizeof stem, "step_%07d", r.step);
                const auto dir = o.output_dir / "snapshots";
                write_snapshot(dir / (std::string(stem) + "_u.bin"), s.u_now.u, "velocity x");
                write_snapshot(dir / (std::string(stem) + "_v.bin"), s.u_now.v, "velocity y");
                if (const FluidSolution* last = stepper.last_solution())
                    write_snapshot(dir / (std::string(stem) + "_p.bin"), last->pressure, "pressure");
            }
            const bool finite = std::isfinite(r.drag) && std::isfinite(r.lift) && std::isfinite(r.max_velocity);
            if (!finite) failure = "non-finite values at step " + std::to_string(r.step);
            return finite;
        });
    } catch (const std::exception& e) {
        failure = e.what();
    }

    Table summary;
    summary.name = "summary";
    summary.description = "run-level diagnostics";
    summary.columns = {{"quantity", "string", "name of the diagnostic"},
                       {"value", "float", "its value (NaN when undefined)"},
                       {"note", "string", "why a value is undefined, or ok"}};
    const std::size_t m = series.rows.size();
    summary.add_row({std::string("steps"), static_cast<double>(m), failure.empty() ? "ok" : failure});
    summary.add_row({std::string("final_time"), m ? series.number(m - 1, "time") : 0.0, std::string("ok")});

    TimeSeries ts;
    std::vector<double> time, lift;
    double max_div = 0.0, max_it = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        StepRecord rec;
        rec.time = series.number(r, "time");
        rec.drag = series.number(r, "drag");
        rec.lift = series.number(r, "lift");
        ts.records.push_back(rec);
        if (rec.time >= n.transient) {
            time.push_back(rec.time);
            lift.push_back(rec.lift);
        }
        max_div = std::max(max_div, series.number(r, "divergence"));
        max_it = std::max(max_it, series.number(r, "iterations"));
    }
    const double t_last = m ? series.number(m - 1, "time") : 0.0;
    const double w0 = n.average_window[0], w1 = n.average_window[1];
    try {
        const double d = mean_drag(ts, w0, w1);
        summary.add_row({std::string("mean_drag"), d,
                         std::string(t_last + 0.5 * n.dt >= w1 ? "ok" : "partial averaging window")});
    } catch (const std::exception& e) {
        summary.add_row({std::string("mean_drag"), kNaN, std::string(e.what())});
    }
    try {
        const double st = strouhal(time, lift, n.u_inf, stepper.config().reference_length);
        summary.add_row({std::string("strouhal"), st, std::string("ok")});
    } catch (const std::exception& e) {
        summary.add_row({std::string("strouhal"), kNaN, std::string(e.what())});
    }
    summary.add_row({std::string("max_iterations"), max_it, std::string("ok")});
    summary.add_row({std::string("max_divergence"), max_div, std::string("ok")});
    summary.add_row({std::string("viscosity"), stepper.config().mu, std::string("ok")});
    summary.add_row({std::string("boundary_points"), static_cast<double>(stepper.config().obstacle.size()),
                     std::string("ok")});

    res.tables.push_back(series);
    res.tables.push_back(summary);
    res.failures = failure.empty() ? 0 : 1;
    return res;
}

// ---------------------------------------------------------------- indicator

ExperimentResult indicator_demo(const RunConfig& c, const RunOptions& o) {
    ExperimentResult res;
    Table t;
    t.name = "indicator";
    t.description = "interior/exterior classification of grid nodes from the discretized boundary";
    t.columns = {{"alpha", "float", "boundary point spacing over meshwidth"},
                 {"n", "int", "grid points per side"},
                 {"n_ib", "int", "boundary points"},
                 {"inside_nodes", "int", "nodes flagged as part of the PDE domain"},
                 {"flagged_area", "float", "inside_nodes times the cell area"},
                 {"polygon_area", "float", "area of the domain bounded by the boundary polygon"},
                 {"band_nodes", "int", "domain nodes inside the near-boundary band"}};
    std::vector<Sweep> rows;
    for (double a : c.alphas)
        for (int n : c.grids) rows.push_back({"", a, 0.0, n});
    struct Out {
        std::vector<Cell> row;
    };
    std::vector<Out> outs(rows.size());
    Logger log(o.log);
    for_each_row(rows.size(), o.threads, [&](std::size_t i) {
        const Sweep& s = rows[i];
        const PeriodicGrid g = make_grid(c, s.n);
        const ImmersedBoundary b = make_boundary(c, g, s.alpha);
        const IndicatorMask mask =
            compute_indicator(b, g, kernel_of(c), scheme_of(c), interpolation_of(c).band(s.n));
        double area = 0.0;
        for (std::size_t k = 0; k < b.curve_count(); ++k) area += std::abs(signed_area(curve_slice(b, k).points));
        if (c.problem.omega == "exterior") area = g.length() * g.length() - area;
        long long band = 0;
        for (std::size_t k = 0; k < mask.inside.size(); ++k) band += mask.inside[k] && mask.near_boundary[k];
        const auto inside = static_cast<long long>(mask.inside_count());
        outs[i].row = {s.alpha, static_cast<long long>(s.n), static_cast<long long>(b.size()), inside,
                       static_cast<double>(inside) * g.h() * g.h(), area, band};
        if (c.output.snapshots && !o.output_dir.empty()) {
            char stem[64];
            std::snprintf(stem, sizeof stem, "indicator_n%d_a%g.bin", s.n, s.alpha);
            write_snapshot(o.output_dir / "snapshots" / stem, g, mask.inside, "inside mask");
        }
        log.line("indicator alpha=" + fmt("%g", s.alpha) + " N=" + std::to_string(s.n));
    });
    for (auto& out : outs) t.add_row(std::move(out.row));
    res.tables.push_back(t);
    return res;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

double observed_order(double e_coarse, double e_fine, int n_coarse, int n_fine) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0) || !std::isfinite(e_coarse) || !std::isfinite(e_fine) ||
        n_fine <= n_coarse)
        return kNaN;
    return std::log2(e_coarse / e_fine) / std::log2(static_cast<double>(n_fine) / n_coarse);
}

PeriodicGrid make_grid(const RunConfig& c, int n) {
    if (c.problem.box_origin)
        return PeriodicGrid(n, c.problem.box_length, Vec2{(*c.problem.box_origin)[0], (*c.problem.box_origin)[1]});
    return PeriodicGrid(n, c.problem.box_length);
}

ImmersedBoundary make_boundary(const RunConfig& c, const PeriodicGrid& g, double alpha) {
    const Orientation o = orientation_of(c);
    std::vector<ImmersedBoundary> parts;
    for (const auto& s : c.problem.shapes) parts.push_back(discretize(shape_spec(s, o), g, alpha));
    return parts.size() == 1 ? parts.front() : concatenate(parts);
}

const Table& ExperimentResult::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return t;
    throw std::out_of_range("no table named '" + name + "'");
}

ExperimentResult run_experiment(const RunConfig& c, const RunOptions& options) {
    validate(c);
    const auto t0 = Clock::now();
    ExperimentResult r;
    switch (c.experiment) {
        case ExperimentKind::ScalarRefine: r = refine(c, options, false, true); break;
        case ExperimentKind::FluidRefine: r = refine(c, options, true, true); break;
        case ExperimentKind::IterationTable: r = refine(c, options, is_fluid(c.problem.equation), false); break;
        case ExperimentKind::DragSweep: r = drag_sweep(c, options); break;
        case ExperimentKind::NsRun: r = ns_run(c, options); break;
        case ExperimentKind::IndicatorDemo: r = indicator_demo(c, options); break;
    }
    r.wall_seconds = seconds_since(t0);
    return r;
}

Metadata metadata_for(const RunConfig& c, const ExperimentResult& r, const Table& t) {
    return {{"table", t.name},
            {"description", t.description},
            {"run", c.name},
            {"experiment", to_string(c.experiment)},
            {"config_hash", config_hash(c)},
            {"failures", std::to_string(r.failures)},
            {"wall_time_s", fmt("%.3f", r.wall_seconds)},
            {"generated_utc", utc_now()}};
}

std::vector<std::filesystem::path> write_result(const RunConfig& c, const ExperimentResult& r,
                                                const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& t : r.tables) {
        const auto csv = dir / (t.name + ".csv");
        write_csv(t, metadata_for(c, r, t), csv);
        write_schema(t, dir / (t.name + ".schema.json"));
        written.push_back(csv);
    }
    std::ofstream(dir / "config.json") << serialize(c);
    return written;
}

}  // namespace ibdl::tools
