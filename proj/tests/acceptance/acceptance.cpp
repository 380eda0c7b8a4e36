// Acceptance checks. Usage: ibdl_acceptance [criterion ...] (default 1-9).
// Each criterion prints its measurements followed by exactly one line
//   PASS criterion K: <summary>   or   FAIL criterion K: <summary>
// and the exit code is non-zero when any requested criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ibdl/coupling.hpp"
#include "ibdl/fluid_solvers.hpp"
#include "ibdl/reference.hpp"
#include "ibdl/scalar_solvers.hpp"
#include "ibdl_tools/builtins.hpp"
#include "ibdl_tools/experiments.hpp"

using namespace ibdl;
using namespace ibdl::tools;

namespace {

struct Verdict {
    bool pass = true;
    std::string summary;
    double budget_seconds = 0.0;  // runtime limit of the criterion
};

// Collects named sub-checks; any failing check fails the criterion.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        std::cout << "  [" << (ok ? "ok" : "FAILED") << "] " << what << "\n";
        pass_ = pass_ && ok;
        ++count_;
        failed_ += !ok;
    }
    bool pass() const { return pass_; }
    std::string tally() const {
        return std::to_string(count_ - failed_) + "/" + std::to_string(count_) + " checks passed";
    }

private:
    bool pass_ = true;
    int count_ = 0, failed_ = 0;
};

std::string num(double x, const char* f = "%.4g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

bool within(double x, double lo, double hi) { return std::isfinite(x) && x >= lo && x <= hi; }

RunConfig builtin(const std::string& name) {
    auto c = find_builtin(name);
    if (!c) throw std::runtime_error("missing builtin " + name);
    return *c;
}

ExperimentResult run(const RunConfig& c, std::ostream* log = nullptr) {
    RunOptions o;
    o.log = log;
    return run_experiment(c, o);
}

// Overall (first to last grid) order from an orders table.
double overall(const Table& orders, const std::string& method, double alpha, double eta, const std::string& column) {
    for (std::size_t r = 0; r < orders.rows.size(); ++r)
        if (orders.text(r, "span") == "overall" && orders.text(r, "method") == method &&
            orders.number(r, "alpha") == alpha && orders.number(r, "eta") == eta)
            return orders.number(r, column);
    return std::nan("");
}

void print_runs(const Table& runs, const std::vector<std::string>& cols) {
    for (std::size_t r = 0; r < runs.rows.size(); ++r) {
        std::cout << "    " << runs.text(r, "method") << " alpha=" << num(runs.number(r, "alpha"))
                  << " eta=" << num(runs.number(r, "eta")) << " N=" << runs.number(r, "n")
                  << " iterations=" << runs.number(r, "iterations");
        for (const auto& c : cols) std::cout << " " << c << "=" << num(runs.number(r, c));
        std::cout << " (" << runs.text(r, "status") << ")\n";
    }
}

// ------------------------------------------------------------------ 1
Verdict criterion1() {
    Checks ck;
    const RunConfig c = builtin("bessel-helmholtz");
    const ExperimentResult r = run(c);
    const Table& t = r.table("iteration_table");
    for (std::size_t col = 1; col < t.columns.size(); ++col) {
        const std::string& name = t.columns[col].name;
        double lo = 1e9, hi = -1e9;
        std::string cells;
        bool capped = true;
        for (std::size_t row = 0; row < t.rows.size(); ++row) {
            const double it = t.number(row, name);
            cells += " " + num(it);
            lo = std::min(lo, it);
            hi = std::max(hi, it);
            capped = capped && it >= 0 && it <= 8;
        }
        std::cout << "    " << name << ":" << cells << "\n";
        ck.expect(capped, name + ": every cell converged within 8 iterations");
        ck.expect(hi - lo <= 3, name + ": spread across N is " + num(hi - lo) + " <= 3");
    }
    return {ck.pass(), "IBDL Bessel iterations bounded and mesh independent, " + ck.tally(), 120};
}

// ------------------------------------------------------------------ 2
Verdict criterion2() {
    Checks ck;
    RunConfig c = builtin("bessel-helmholtz");
    c.methods = {"ibsl"};
    c.experiment = ExperimentKind::ScalarRefine;

    c.grids = {64};
    c.alphas = {2.0};
    const Table coarse = run(c).table("runs");
    print_runs(coarse, {"linf"});
    const double it_coarse = coarse.number(0, "iterations");
    ck.expect(coarse.text(0, "status") == "ok", "alpha=2, N=64 converged");
    ck.expect(within(it_coarse, 9, 26), "alpha=2, N=64: " + num(it_coarse) + " iterations in [9, 26]");

    c.grids = {256};
    c.alphas = {1.0};
    const Table fine = run(c).table("runs");
    print_runs(fine, {"linf"});
    const double it_fine = fine.number(0, "iterations");
    ck.expect(it_fine >= 400, "alpha=1, N=256: " + num(it_fine) + " iterations >= 400");
    return {ck.pass(), "IBSL iteration counts blow up with refinement, " + ck.tally(), 600};
}

// ------------------------------------------------------------------ 3
Verdict criterion3() {
    Checks ck;
    RunConfig c = builtin("bessel-helmholtz");
    c.experiment = ExperimentKind::ScalarRefine;
    c.methods = {"ibsl", "ibdl"};
    c.alphas = {0.75};
    c.grids = {64, 128, 256, 512};
    c.discretization.interpolation = {"fixed", 6, 8, 2};
    const ExperimentResult r = run(c);
    print_runs(r.table("runs"), {"l1", "l2", "linf"});
    for (const std::string m : {"ibsl", "ibdl"})
        for (const std::string norm : {"l1", "l2"}) {
            const double p = overall(r.table("orders"), m, 0.75, 0.0, "order_" + norm);
            ck.expect(within(p, 0.7, 1.3), m + " " + norm + " order 64->512: " + num(p) + " in [0.7, 1.3]");
        }
    ck.expect(r.failures == 0, "all solves converged");
    return {ck.pass(), "first-order convergence on the Bessel problem, " + ck.tally(), 300};
}

// ------------------------------------------------------------------ 4
Verdict criterion4() {
    Checks ck;
    const RunConfig c = builtin("brinkman-manufactured");
    const ExperimentResult r = run(c);
    const Table& runs = r.table("runs");
    print_runs(runs, {"velocity_l1", "velocity_linf", "pressure_l1", "pressure_linf", "divergence"});
    double worst = 0;
    for (std::size_t row = 0; row < runs.rows.size(); ++row) worst = std::max(worst, runs.number(row, "iterations"));
    ck.expect(r.failures == 0, "all solves converged");
    ck.expect(worst <= 12, "largest iteration count " + num(worst) + " <= 12");
    const Table& orders = r.table("orders");
    const double alpha = c.alphas.front();
    for (const std::string q : {"velocity", "pressure"})
        for (const std::string norm : {"l1", "l2"}) {
            const double p = overall(orders, "ibdl", alpha, 0.0, "order_" + q + "_" + norm);
            ck.expect(within(p, 0.7, 1.3), q + " " + norm + " order 32->512: " + num(p) + " in [0.7, 1.3]");
        }
    return {ck.pass(), "Brinkman manufactured solution, " + ck.tally(), 600};
}

// ------------------------------------------------------------------ 5
Verdict criterion5() {
    Checks ck;
    const RunConfig c = builtin("neumann-circle");
    const ExperimentResult r = run(c);
    const Table& runs = r.table("runs");
    print_runs(runs, {"l1", "linf", "boundary_l1", "boundary_linf"});
    double worst = 0;
    for (std::size_t row = 0; row < runs.rows.size(); ++row) worst = std::max(worst, runs.number(row, "iterations"));
    ck.expect(r.failures == 0, "all solves converged");
    ck.expect(worst <= 8, "largest iteration count " + num(worst) + " <= 8");
    const double alpha = c.alphas.front();
    for (const std::string col : {"l1", "boundary_l1"}) {
        const double p = overall(r.table("orders"), "ibdl", alpha, 0.0, "order_" + col);
        ck.expect(within(p, 0.7, 1.3), col + " order 64->512: " + num(p) + " in [0.7, 1.3]");
    }
    return {ck.pass(), "Neumann problem, " + ck.tally(), 300};
}

// ------------------------------------------------------------------ 6
Verdict criterion6() {
    Checks ck;
    RunConfig c = builtin("cylinder-drag");
    c.drag.areas = {0.05, 0.1, 0.6};
    const ExperimentResult r = run(c);
    const Table& t = r.table("drag");
    const std::map<double, std::pair<double, double>> reference{
        {0.05, {15.5578, 0.02}}, {0.1, {24.8317, 0.02}}, {0.6, {1763.57, 0.08}}};
    for (std::size_t row = 0; row < t.rows.size(); ++row) {
        const double area = t.number(row, "area"), drag = t.number(row, "drag");
        const auto [ref, tol] = reference.at(area);
        const double rel = std::abs(drag - ref) / ref;
        std::cout << "    c=" << area << " drag=" << num(drag, "%.6g") << " iterations=" << t.number(row, "iterations")
                  << " reference=" << ref << "\n";
        ck.expect(t.text(row, "status") == "ok" && rel <= tol,
                  "c=" + num(area) + ": relative deviation " + num(rel) + " <= " + num(tol));
    }
    ck.expect(t.rows.size() == 3, "three areas were run");
    return {ck.pass(), "dimensionless drag at N=1024, " + ck.tally(), 1800};
}

// ------------------------------------------------------------------ 7
Verdict criterion7() {
    Checks ck;
    const RunConfig c = builtin("exterior-poisson-completion");
    const ExperimentResult r = run(c);
    const Table& runs = r.table("runs");
    print_runs(runs, {"l1", "l2", "linf"});
    std::vector<double> linf0;
    for (std::size_t row = 0; row < runs.rows.size(); ++row)
        if (runs.number(row, "eta") == 0.0) linf0.push_back(runs.number(row, "linf"));
    bool non_decreasing = linf0.size() == c.grids.size();
    for (std::size_t k = 1; k < linf0.size(); ++k) non_decreasing = non_decreasing && linf0[k] >= linf0[k - 1];
    std::string seq;
    for (double e : linf0) seq += " " + num(e);
    ck.expect(non_decreasing, "eta=0 max error non-decreasing with N:" + seq);
    const double alpha = c.alphas.front();
    const double p = overall(r.table("orders"), "ibdl", alpha, 10.0, "order_l1");
    ck.expect(within(p, 0.7, 1.3), "eta=10 l1 order 64->512: " + num(p) + " in [0.7, 1.3]");
    return {ck.pass(), "exterior completion, " + ck.tally(), 600};
}

// ------------------------------------------------------------------ 8
double dense_mismatch(const LinearOperator& op, unsigned seed) {
    const DenseMatrix a = assemble_dense(op);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double worst = 0.0;
    // Column-by-column: the dense entries must reproduce a second, independent
    // application to each unit vector, and random combinations of columns.
    std::vector<double> e(op.dimension, 0.0), x(op.dimension);
    for (std::size_t j = 0; j < op.dimension; ++j) {
        e[j] = 1.0;
        const auto col = op(e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < op.dimension; ++i) worst = std::max(worst, std::abs(col[i] - a(i, j)));
    }
    for (int trial = 0; trial < 3; ++trial) {
        for (auto& v : x) v = d(rng);
        const auto y = op(x);
        for (std::size_t i = 0; i < op.dimension; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < op.dimension; ++j) s += a(i, j) * x[j];
            worst = std::max(worst, std::abs(s - y[i]));
        }
    }
    return worst;
}

Verdict criterion8() {
    Checks ck;
    const PeriodicGrid g(32, 1.0);
    const ScalarExact bessel = scalar_exact(AnalyticKind::BesselHelmholtz, 0.25);
    ScalarProblem sp(g);
    sp.boundary = discretize({Circle{{0, 0}, 0.25}, Orientation::InteriorIsOmega}, g, 1.0);
    sp.k2 = 1.0;
    sp.rhs = sample_field(g, bessel.forcing);
    sp.dirichlet = boundary_trace(sp.boundary, bessel.value);
    const double sl = dense_mismatch(ibsl_scalar_operator(sp), 1);
    const double dl = dense_mismatch(ibdl_scalar_operator(sp), 2);
    ck.expect(sl <= 1e-12, "IBSL scalar operator: largest dense/matrix-free difference " + num(sl));
    ck.expect(dl <= 1e-12, "IBDL scalar operator: largest dense/matrix-free difference " + num(dl));

    FluidProblem fp(PeriodicGrid(32, 2.0));
    fp.boundary = discretize({Circle{{0, 0}, 0.75}, Orientation::InteriorIsOmega}, fp.grid, 1.0);
    fp.k2 = 0.0;
    fp.ub_x.assign(fp.boundary.size(), 0.0);
    fp.ub_y.assign(fp.boundary.size(), 0.0);
    const double st = dense_mismatch(ibdl_fluid_operator(fp), 3);
    ck.expect(st <= 1e-12, "IBDL Stokes operator (with mean rows): largest difference " + num(st));
    fp.boundary = discretize({Circle{{0, 0}, 0.75}, Orientation::ExteriorIsOmega}, fp.grid, 1.0);
    fp.interior = false;
    fp.eta = 10.0;
    const double ext = dense_mismatch(ibdl_fluid_operator(fp), 4);
    ck.expect(ext <= 1e-12, "completed exterior IBDL Stokes operator: largest difference " + num(ext));

    // <S F, u>_h = sum_i F_i ds_i (S* u)_i on random geometry and data.
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const PeriodicGrid gg(16 << (trial % 3), 0.5 + unit(rng));
        const double r = (0.1 + 0.25 * unit(rng)) * gg.length();
        const auto b = discretize({Circle{{0.05 * sym(rng), 0.05 * sym(rng)}, r}, Orientation::InteriorIsOmega}, gg,
                                  0.5 + 1.5 * unit(rng));
        const Coupler cp(b, gg, CouplingKernel{trial % 2 ? KernelKind::BSpline6 : KernelKind::Peskin4});
        std::vector<double> F(b.size());
        for (auto& v : F) v = sym(rng);
        ScalarField u(gg);
        for (auto& v : u.values) v = sym(rng);
        const ScalarField sf = cp.spread(F);
        const auto su = cp.interpolate(u);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t k = 0; k < u.values.size(); ++k) lhs += sf.values[k] * u.values[k] * gg.h() * gg.h();
        for (std::size_t i = 0; i < b.size(); ++i) rhs += F[i] * b.weights[i] * su[i];
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    ck.expect(worst <= 1e-12, "spread/interpolate adjointness over 100 random instances: worst " + num(worst));
    return {ck.pass(), "operator oracles at N=32, " + ck.tally(), 120};
}

// ------------------------------------------------------------------ 9
Verdict criterion9() {
    Checks ck;
    RunConfig c = builtin("ns-re10");
    c.ns.t_end.reset();
    c.ns.steps = 500;
    c.ns.progress_every = 0;
    const ExperimentResult r = run(c);
    const Table& s = r.table("series");
    double max_div = 0, max_it = 0;
    bool finite = true;
    for (std::size_t row = 0; row < s.rows.size(); ++row) {
        max_div = std::max(max_div, s.number(row, "divergence"));
        max_it = std::max(max_it, s.number(row, "iterations"));
        for (const char* col : {"drag", "lift", "divergence", "max_velocity"})
            finite = finite && std::isfinite(s.number(row, col));
    }
    const std::size_t last = s.rows.size() - 1;
    std::cout << "    steps=" << s.rows.size() << " t=" << num(s.number(last, "time")) << " drag="
              << num(s.number(last, "drag")) << " lift=" << num(s.number(last, "lift"), "%.3e") << "\n";
    ck.expect(s.rows.size() == 500 && r.failures == 0, "500 steps completed");
    ck.expect(finite, "no NaN or infinite values");
    ck.expect(max_div <= 1e-8 * c.ns.u_inf, "largest divergence residual " + num(max_div) + " <= 1e-8 u_inf");
    ck.expect(max_it <= 40, "largest per-step iteration count " + num(max_it) + " <= 40");
    return {ck.pass(), "Re=10 Navier-Stokes smoke run, " + ck.tally(), 1200};
}

// ------------------------------------------------------------------ 10
double summary_value(const ExperimentResult& r, const std::string& q) {
    const Table& s = r.table("summary");
    for (std::size_t row = 0; row < s.rows.size(); ++row)
        if (s.text(row, "quantity") == q) {
            std::cout << "    " << q << " = " << num(s.number(row, "value"), "%.6g") << " (" << s.text(row, "note")
                      << ")\n";
            return s.number(row, "value");
        }
    return std::nan("");
}

Verdict criterion10() {
    Checks ck;
    RunConfig re10 = builtin("ns-re10");
    re10.ns.progress_every = 5000;
    const ExperimentResult a = run(re10, &std::cout);
    const double cd = summary_value(a, "mean_drag");
    ck.expect(within(cd, 0.29, 0.34), "Re=10 mean drag over [54, 144]: " + num(cd) + " in [0.29, 0.34]");

    RunConfig re100 = builtin("ns-re100");
    re100.ns.progress_every = 5000;
    const ExperimentResult b = run(re100, &std::cout);
    const double st = summary_value(b, "strouhal");
    ck.expect(within(st, 0.145, 0.175), "Re=100 Strouhal number: " + num(st) + " in [0.145, 0.175]");
    return {ck.pass(), "long Navier-Stokes runs, " + ck.tally(), 0};
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::function<Verdict()>> criteria{
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (!criteria.count(k)) {
            std::cerr << "usage: " << argv[0] << " [criterion 1-10 ...]\n";
            return 2;
        }
        wanted.push_back(k);
    }
    if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    int failed = 0;
    for (int k : wanted) {
        std::cout << "criterion " << k << "\n" << std::flush;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria.at(k)();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (v.budget_seconds > 0 && secs > v.budget_seconds) {
            v.pass = false;
            v.summary += ", over the " + num(v.budget_seconds) + " s budget";
        }
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << v.summary << " ("
                  << num(secs, "%.1f") << " s)\n"
                  << std::flush;
        failed += !v.pass;
    }
    return failed == 0 ? 0 : 1;
}
