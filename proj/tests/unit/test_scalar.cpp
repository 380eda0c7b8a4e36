#include <complex>
#include <numbers>

#include "helpers.hpp"
#include "ibdl/reference.hpp"
#include "ibdl/scalar_solvers.hpp"

using namespace ibdl;
using Catch::Matchers::WithinAbs;

namespace {

ScalarProblem bessel_problem(int n, double alpha) {
    const PeriodicGrid g(n, 1.0);
    ScalarProblem p(g);
    p.boundary = discretize({Circle{{0, 0}, 0.25}, Orientation::InteriorIsOmega}, g, alpha);
    p.k2 = 1.0;
    const ScalarExact e = scalar_exact(AnalyticKind::BesselHelmholtz, 0.25);
    p.rhs = sample_field(g, e.forcing);
    p.dirichlet = boundary_trace(p.boundary, e.value);
    return p;
}

double interior_error(const ScalarSolution& s, const ScalarExact& e) {
    const ScalarField err = s.u - sample_field(s.u.grid, e.value);
    return masked_norms(err, s.mask).linf;
}

}  // namespace

TEST_CASE("right-hand side extensions", "[scalar]") {
    const PeriodicGrid g(32, 1.0);
    const auto b = discretize({Circle{{0, 0}, 0.25}, Orientation::InteriorIsOmega}, g, 1.0);
    const IndicatorMask m = compute_indicator(b, g, CouplingKernel{}, DiffScheme::FiniteDifference);
    const ScalarField f(g, 1.0);
    CHECK(extend_rhs(f, m, Extension::Smooth).values == f.values);
    const ScalarField zero = extend_rhs(f, m, Extension::Zero);
    CHECK_THAT(zero.mean() * static_cast<double>(g.size()), WithinAbs(static_cast<double>(m.inside_count()), 1e-9));
    CHECK_THAT(extend_rhs(f, m, Extension::MeanBalance).mean(), WithinAbs(0.0, 1e-14));
    CHECK(parse_extension(to_string(Extension::MeanBalance)) == Extension::MeanBalance);
    CHECK_THROWS(parse_extension("sideways"));
}

TEST_CASE("problem validation", "[scalar]") {
    ScalarProblem p = bessel_problem(32, 1.0);
    CHECK_NOTHROW(p.validate());
    p.neumann = *p.dirichlet;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.neumann.reset();
    p.dirichlet->pop_back();
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    ScalarProblem q = bessel_problem(32, 1.0);
    q.k2 = 0.0;
    CHECK_THROWS_AS(solve_ibsl_helmholtz(q), std::invalid_argument);
}

TEST_CASE("double layer Dirichlet solve of the Bessel problem", "[scalar]") {
    const ScalarExact e = scalar_exact(AnalyticKind::BesselHelmholtz, 0.25);
    const ScalarSolution s = solve_ibdl_scalar(bessel_problem(64, 1.0));
    REQUIRE(s.report.converged);
    CHECK(s.report.iterations <= 8);
    CHECK(interior_error(s, e) < 0.1);
    CHECK(s.u.all_finite());
}

TEST_CASE("single layer Dirichlet solves", "[scalar]") {
    const ScalarExact e = scalar_exact(AnalyticKind::BesselHelmholtz, 0.25);
    const ScalarSolution s = solve_ibsl_helmholtz(bessel_problem(64, 2.0));
    REQUIRE(s.report.converged);
    CHECK(interior_error(s, e) < 0.15);

    // Interior Poisson problem with a non-trivial mean correction.
    const PeriodicGrid g(64, 4.0);
    ScalarProblem p(g);
    p.boundary = discretize({Circle{{0, 0}, 1.0}, Orientation::InteriorIsOmega}, g, 1.0);
    const ScalarExact trig = scalar_exact(AnalyticKind::PoissonTrig);
    p.rhs = sample_field(g, trig.forcing);
    p.dirichlet = boundary_trace(p.boundary, trig.value);
    const ScalarSolution sl = solve_ibsl_poisson(p);
    REQUIRE(sl.report.converged);
    CHECK(interior_error(sl, trig) < 0.15);
    const ScalarSolution dl = solve_ibdl_scalar(p);
    REQUIRE(dl.report.converged);
    CHECK(dl.report.iterations < sl.report.iterations);
    CHECK(interior_error(dl, trig) < 0.15);
}

TEST_CASE("Neumann problem recovers boundary values", "[scalar]") {
    const PeriodicGrid g(64, 1.0);
    ScalarProblem p(g);
    p.boundary = discretize({Circle{{0, 0}, 0.25}, Orientation::InteriorIsOmega}, g, 0.75);
    p.k2 = 1.0;
    const ScalarExact e = scalar_exact(AnalyticKind::Quadratic, 0.25, 1.0);
    p.rhs = sample_field(g, e.forcing);
    std::vector<double> flux(p.boundary.size());
    for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = dot(e.gradient(p.boundary.points[i]), p.boundary.normals[i]);
    p.neumann = flux;
    const ScalarSolution s = solve_ibdl_neumann(p);
    REQUIRE(s.report.converged);
    CHECK(s.report.iterations <= 8);
    const auto trace = boundary_trace(p.boundary, e.value);
    CHECK(testing::max_diff(s.density, trace) < 0.05);
    CHECK(interior_error(s, e) < 0.05);
}

TEST_CASE("dense spectra of the boundary operators", "[scalar]") {
    // N = 32 with twenty boundary points on the circle.
    ScalarProblem p = bessel_problem(32, 2 * std::numbers::pi * 0.25 * 32 / 20);
    REQUIRE(p.boundary.size() == 20);
    const DenseMatrix dl = assemble_dense(ibdl_scalar_operator(p));
    const DenseMatrix sl = assemble_dense(ibsl_scalar_operator(p));

    // Equal weights make the single layer matrix symmetric.
    for (std::size_t i = 0; i < sl.rows; ++i)
        for (std::size_t j = 0; j < i; ++j) CHECK_THAT(sl(i, j), WithinAbs(sl(j, i), 1e-12));

    // Second-kind structure: the spectrum gathers around one half.
    double radius = 0.0;
    for (auto lam : eigenvalues(dl)) radius = std::max(radius, std::abs(lam - 0.5));
    INFO("largest distance of an eigenvalue from 1/2: " << radius);
    CHECK(radius < 0.5);

    const double cond_dl = condition_number(dl), cond_sl = condition_number(sl);
    INFO("condition numbers: double layer " << cond_dl << ", single layer " << cond_sl);
    CHECK(cond_sl >= 100 * cond_dl);
}

TEST_CASE("boundary data taken from the free-space solution needs no density", "[scalar]") {
    // With U_b = S* L^-1 g the smooth extension already satisfies the boundary
    // condition, so the layer density should vanish.
    const PeriodicGrid g(64, 1.0);
    ScalarProblem p(g);
    p.boundary = discretize({Circle{{0.02, 0}, 0.25}, Orientation::InteriorIsOmega}, g, 1.0);
    p.k2 = 1.0;
    p.extension = Extension::Smooth;
    p.rhs = sample(g, [](double x, double y) { return std::sin(2 * std::numbers::pi * x) * std::cos(2 * std::numbers::pi * y) + 0.3; });
    const ScalarField free = helmholtz_inverse(p.rhs, 1.0, p.k2, p.scheme);
    p.dirichlet = interpolate(free, p.boundary, p.kernel);
    const double scale = free.max_abs();
    for (const ScalarSolution& s : {solve_ibsl_helmholtz(p), solve_ibdl_scalar(p)}) {
        REQUIRE(s.report.converged);
        double largest = 0.0;
        for (double q : s.density) largest = std::max(largest, std::abs(q));
        CHECK(largest < 1e-8 * scale);
        CHECK(testing::max_diff(s.u_raw, free) < 1e-8 * scale);
    }
}

TEST_CASE("constant boundary data with no forcing", "[scalar]") {
    const PeriodicGrid g(64, 1.0);
    ScalarProblem p(g);
    p.boundary = discretize({Circle{{0, 0}, 0.25}, Orientation::InteriorIsOmega}, g, 1.0);
    p.dirichlet = std::vector<double>(p.boundary.size(), 2.5);
    // The single layer carries the constant in the mean correction and is exact.
    const ScalarSolution sl = solve_ibsl_poisson(p);
    REQUIRE(sl.report.converged);
    CHECK_THAT(sl.mean_correction, WithinAbs(2.5, 1e-8));
    CHECK(masked_norms(sl.u - ScalarField(g, 2.5), sl.mask).linf < 1e-6);
    // The double layer builds it from a smeared jump, so only the corrected
    // field is close to the constant.
    const ScalarSolution dl = solve_ibdl_scalar(p);
    REQUIRE(dl.report.converged);
    CHECK(masked_norms(dl.u - ScalarField(g, 2.5), dl.mask).linf < 0.06);

    // Zero data everywhere gives the zero solution.
    p.dirichlet = std::vector<double>(p.boundary.size(), 0.0);
    for (const ScalarSolution& s : {solve_ibsl_poisson(p), solve_ibdl_scalar(p)}) {
        CHECK(s.report.converged);
        CHECK(s.u.max_abs() == 0.0);
    }
    p.k2 = 1.0;
    const ScalarSolution h = solve_ibsl_helmholtz(p);
    CHECK(h.u.max_abs() == 0.0);
}

TEST_CASE("Neumann problem with a constant solution", "[scalar]") {
    // u = c solves Laplacian(u) - k2 u = -k2 c with zero flux. The cut-off
    // forcing makes this first order, so check the error halves.
    auto error = [](int n) {
        const PeriodicGrid g(n, 1.0);
        ScalarProblem p(g);
        p.boundary = discretize({Circle{{0, 0}, 0.25}, Orientation::InteriorIsOmega}, g, 0.75);
        p.k2 = 1.0;
        p.rhs = ScalarField(g, -1.5);
        p.neumann = std::vector<double>(p.boundary.size(), 0.0);
        const ScalarSolution s = solve_ibdl_neumann(p);
        REQUIRE(s.report.converged);
        CHECK(masked_norms(s.u - ScalarField(g, 1.5), s.mask).linf < 0.15);
        return testing::max_diff(s.density, std::vector<double>(s.density.size(), 1.5));
    };
    const double coarse = error(64), fine = error(128);
    INFO("boundary value errors " << coarse << " and " << fine);
    CHECK(coarse < 0.15);
    CHECK(coarse / fine > 1.7);

    ScalarProblem q(PeriodicGrid(32, 1.0));
    q.boundary = discretize({Circle{{0, 0}, 0.25}, Orientation::InteriorIsOmega}, q.grid, 1.0);
    q.k2 = 1.0;
    q.neumann = std::vector<double>(q.boundary.size(), 0.0);
    q.extension = Extension::Smooth;
    CHECK_THROWS_AS(solve_ibdl_neumann(q), std::invalid_argument);
}
