#include <numbers>

#include "helpers.hpp"
#include "ibdl/navier_stokes.hpp"

using namespace ibdl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Strouhal number of a synthetic lift history", "[navier-stokes]") {
    std::vector<double> t, lift;
    const double f = 0.37;
    for (int k = 0; k < 4000; ++k) {
        t.push_back(0.01 * k);
        lift.push_back(0.2 + 0.05 * std::sin(2 * std::numbers::pi * f * t.back()));
    }
    // 2 R f / u_inf with R = 0.15.
    CHECK_THAT(strouhal(t, lift, 1.0, 0.15), WithinRel(2 * 0.15 * f, 1e-5));
    CHECK_THAT(strouhal(t, lift, 2.0, 0.15), WithinRel(0.15 * f, 1e-5));

    const std::vector<double> flat(t.size(), 0.3);
    CHECK_THROWS_WITH(strouhal(t, flat, 1.0, 0.15), Catch::Matchers::ContainsSubstring("flat"));
    std::vector<double> noise = flat;
    for (std::size_t k = 0; k < noise.size(); ++k) noise[k] += 1e-14 * std::sin(0.7 * k * k);
    CHECK_THROWS(strouhal(t, noise, 1.0, 0.15));

    const std::vector<double> short_t(t.begin(), t.begin() + 300), short_l(lift.begin(), lift.begin() + 300);
    CHECK_THROWS_WITH(strouhal(short_t, short_l, 1.0, 0.15), Catch::Matchers::ContainsSubstring("three"));
    CHECK_THROWS_AS(strouhal(t, short_l, 1.0, 0.15), std::invalid_argument);
}

TEST_CASE("mean drag over a window", "[navier-stokes]") {
    TimeSeries s;
    for (int k = 0; k < 10; ++k) s.records.push_back({k, double(k), double(k), 0.0});
    CHECK(mean_drag(s, 2.0, 4.0) == 3.0);
    CHECK_THROWS(mean_drag(s, 20.0, 30.0));
}

TEST_CASE("inflow strip and velocity gradient", "[navier-stokes]") {
    const NSConfig cfg = NSConfig::cylinder(10.0, 64);
    VectorField u(cfg.grid);
    u = apply_inflow_strip(u, cfg);
    CHECK(u.u(cfg.strip_width - 1, 5) == 1.0);
    CHECK(u.u(cfg.strip_width, 5) == 0.0);

    const double k = 2 * std::numbers::pi / 8.0;
    const VectorField w(sample(cfg.grid, [&](double x, double y) { return std::sin(k * x) * std::cos(k * y); }),
                        sample(cfg.grid, [&](double x, double) { return std::cos(2 * k * x); }));
    const VelocityGradient gsp = velocity_gradient(w, DiffScheme::Spectral);
    const ScalarField ux = sample(cfg.grid, [&](double x, double y) { return k * std::cos(k * x) * std::cos(k * y); });
    CHECK(testing::max_diff(gsp.ux, ux) < 1e-12);
    CHECK(gsp.vy.max_abs() < 1e-12);
    const VelocityGradient gfd = velocity_gradient(w, DiffScheme::FiniteDifference);
    CHECK(testing::max_diff(gfd.uy, derivative_y(w.u, DiffScheme::FiniteDifference)) < 1e-14);
}

TEST_CASE("control-box force of a uniform stream vanishes", "[navier-stokes]") {
    NSConfig cfg = NSConfig::cylinder(10.0, 64);
    cfg.control_box = {0.5, 3.25, 2.75, 5.25};  // on grid lines at h = 1/8
    IndicatorMask mask(cfg.grid);
    std::fill(mask.inside.begin(), mask.inside.end(), 1);
    VectorField u(cfg.grid);
    for (auto& v : u.u.values) v = 1.0;
    const ScalarField p(cfg.grid, 0.3);
    for (bool bootstrap : {true, false}) {
        const Vec2 f = control_box_force(u, u, u, p, mask, cfg, bootstrap);
        CHECK_THAT(f.x, WithinAbs(0.0, 1e-12));
        CHECK_THAT(f.y, WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("configuration checks", "[navier-stokes]") {
    NSConfig cfg = NSConfig::cylinder(10.0, 64);
    CHECK_NOTHROW(cfg.validate());
    CHECK_THAT(cfg.mu, WithinRel(0.03, 1e-15));
    cfg.dt = 0.0;
    CHECK_THROWS(cfg.validate());
    CHECK(parse_ns_method(to_string(NSMethod::IBSL)) == NSMethod::IBSL);
}

TEST_CASE("a few steps past a cylinder stay divergence free", "[navier-stokes]") {
    for (auto method : {NSMethod::IBDL, NSMethod::IBSL}) {
        NSConfig cfg = NSConfig::cylinder(10.0, 128);
        cfg.method = method;
        cfg.control_box = {0.5, 3.25, 2.75, 5.25};
        NavierStokesStepper stepper(cfg);
        NSState state = stepper.initial_state();
        // Impulsive start: fluid at rest apart from the inflow strip.
        CHECK(state.u_now.u(0, 10) == cfg.u_inf);
        CHECK(state.u_now.u(10, 10) == 0.0);
        const TimeSeries ts = run_navier_stokes(stepper, state, 4);
        REQUIRE(ts.records.size() == 4);
        CHECK(state.step_index == 4);
        CHECK_THAT(state.time, WithinRel(4 * cfg.dt, 1e-12));
        for (const auto& r : ts.records) {
            CHECK(r.converged);
            CHECK(r.iterations <= 40);
            CHECK(r.divergence_residual <= 1e-8);
            CHECK(std::isfinite(r.drag));
        }
        CHECK(state.u_now.u.all_finite());
        REQUIRE(stepper.last_solution() != nullptr);

        // Stopping early from the callback.
        int seen = 0;
        run_navier_stokes(stepper, state, 5, [&](const StepRecord&, const NSState&) { return ++seen < 2; });
        CHECK(seen == 2);
    }
}

TEST_CASE("inflow strip edge cases", "[navier-stokes]") {
    NSConfig cfg = NSConfig::cylinder(10.0, 64);
    const VectorField w(testing::random_field(cfg.grid, 1), testing::random_field(cfg.grid, 2));
    const VectorField once = apply_inflow_strip(w, cfg);
    const VectorField twice = apply_inflow_strip(once, cfg);
    CHECK(twice.u.values == once.u.values);
    CHECK(twice.v.values == once.v.values);
    CHECK(once.v(0, 7) == 0.0);

    cfg.strip_width = 0;
    const VectorField same = apply_inflow_strip(w, cfg);
    CHECK(same.u.values == w.u.values);
    CHECK(same.v.values == w.v.values);
}

TEST_CASE("fluid at rest stays at rest", "[navier-stokes]") {
    // Without the inflow strip nothing drives the flow, so zero is a fixed
    // point and the obstacle feels no force.
    NSConfig cfg = NSConfig::cylinder(10.0, 64);
    cfg.control_box = {0.5, 3.25, 2.75, 5.25};
    cfg.strip_width = 0;
    NavierStokesStepper stepper(cfg);
    NSState state = stepper.initial_state();
    CHECK(state.u_now.max_abs() == 0.0);
    const TimeSeries ts = run_navier_stokes(stepper, state, 3);
    for (const auto& r : ts.records) {
        CHECK(r.drag == 0.0);
        CHECK(r.lift == 0.0);
        CHECK(r.max_velocity == 0.0);
    }
    CHECK(state.u_now.max_abs() == 0.0);

    const VectorField zero(cfg.grid);
    const Vec2 f = control_box_force(zero, zero, zero, ScalarField(cfg.grid), stepper.mask(), cfg, false);
    CHECK(f.x == 0.0);
    CHECK(f.y == 0.0);
}
