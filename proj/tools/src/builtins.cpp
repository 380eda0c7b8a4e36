#include "ibdl_tools/builtins.hpp"

#include <numbers>

namespace ibdl::tools {

namespace {

ShapeConfig circle(double x, double y, double r) {
    ShapeConfig s;
    s.type = "circle";
    s.center = {x, y};
    s.radius = r;
    return s;
}

ShapeConfig ellipse(double x, double y, double a, double b, double rotation) {
    ShapeConfig s;
    s.type = "ellipse";
    s.center = {x, y};
    s.semi_a = a;
    s.semi_b = b;
    s.rotation = rotation;
    return s;
}

RunConfig base(const std::string& name, ExperimentKind kind) {
    RunConfig c;
    c.name = name;
    c.experiment = kind;
    c.output.directory = "out/" + name;
    return c;
}

void fixed_band(RunConfig& c, int m1, int m2) {
    c.discretization.interpolation.policy = "fixed";
    c.discretization.interpolation.m1 = m1;
    c.discretization.interpolation.m2 = m2;
}

void log_band(RunConfig& c, int growth) {
    c.discretization.interpolation.policy = "log-growth";
    c.discretization.interpolation.growth = growth;
}

RunConfig bessel_helmholtz() {
    RunConfig c = base("bessel-helmholtz", ExperimentKind::IterationTable);
    c.problem.equation = Equation::Helmholtz;
    c.problem.solution = "bessel-helmholtz";
    c.problem.k2 = 1.0;
    c.problem.solution_length = 0.25;
    c.problem.shapes = {circle(0.0, 0.0, 0.25)};
    fixed_band(c, 6, 8);
    c.grids = {64, 128, 256, 512, 1024};
    c.alphas = {0.75, 1.0, 1.5, 2.0};
    c.methods = {"ibdl"};
    return c;
}

RunConfig starfish_poisson() {
    RunConfig c = base("starfish-poisson", ExperimentKind::ScalarRefine);
    c.problem.equation = Equation::Poisson;
    c.problem.solution = "poisson-trig";
    c.problem.box_length = 4.0;
    ShapeConfig star;
    star.type = "starfish";
    c.problem.shapes = {star};
    c.problem.omega = "exterior";
    c.problem.extension = "smooth";
    fixed_band(c, 6, 8);
    c.grids = {64, 128, 256, 512};
    c.alphas = {0.75};
    c.methods = {"ibdl", "ibsl"};
    // The single layer needs a few thousand iterations at this spacing.
    c.discretization.max_iterations = 20000;
    return c;
}

RunConfig exterior_poisson_completion() {
    RunConfig c = base("exterior-poisson-completion", ExperimentKind::ScalarRefine);
    c.problem.equation = Equation::Poisson;
    c.problem.solution = "exp-poisson";
    c.problem.solution_length = 8.0;
    c.problem.box_length = 8.0;
    c.problem.shapes = {circle(0.0, 0.0, 0.25)};
    c.problem.omega = "exterior";
    fixed_band(c, 6, 8);
    c.grids = {64, 128, 256, 512};
    c.alphas = {0.75};
    c.etas = {0.0, 10.0};
    c.errors.exclude_band = true;
    return c;
}

RunConfig neumann_circle() {
    RunConfig c = base("neumann-circle", ExperimentKind::ScalarRefine);
    c.problem.equation = Equation::Neumann;
    c.problem.solution = "quadratic";
    c.problem.k2 = 1.0;
    c.problem.shapes = {circle(0.0, 0.0, 0.25)};
    fixed_band(c, 6, 8);
    c.grids = {64, 128, 256, 512};
    c.alphas = {0.75};
    return c;
}

RunConfig brinkman_manufactured() {
    RunConfig c = base("brinkman-manufactured", ExperimentKind::FluidRefine);
    c.problem.equation = Equation::Brinkman;
    c.problem.solution = "brinkman-trig";
    c.problem.k2 = 1.0;
    c.problem.box_length = 2.0;
    c.problem.shapes = {circle(0.0, 0.0, 0.75)};
    c.discretization.scheme = "spectral";
    log_band(c, 2);
    c.grids = {32, 64, 128, 256, 512};
    c.alphas = {1.5};
    c.errors.pressure_offset = 0.02;
    return c;
}

RunConfig eta_sweep() {
    RunConfig c = base("eta-sweep", ExperimentKind::FluidRefine);
    c.problem.equation = Equation::Stokes;
    c.problem.solution = "brinkman-trig";
    c.problem.wavenumber = std::numbers::pi;
    c.problem.box_length = 2.0;
    c.problem.shapes = {circle(0.0, 0.0, 0.75)};
    c.problem.omega = "exterior";
    c.problem.extension = "smooth";
    c.discretization.scheme = "spectral";
    log_band(c, 2);
    c.grids = {32, 64, 128, 256};
    c.alphas = {1.0};
    c.etas = {1.0, 10.0, 100.0, 1000.0};
    return c;
}

RunConfig fd_method2() {
    RunConfig c = base("fd-method2", ExperimentKind::FluidRefine);
    c.problem.equation = Equation::Stokes;
    c.problem.solution = "stokes-exp";
    c.problem.shapes = {circle(0.0, 0.0, 0.25)};
    c.discretization.scheme = "finite-difference";
    c.discretization.stencil = "standard5";
    c.discretization.kernel = "bspline6";
    fixed_band(c, 6, 8);
    c.grids = {64, 128, 256, 512};
    c.alphas = {0.75};
    c.errors.pressure_offset = 0.02;
    return c;
}

RunConfig cylinder_drag() {
    RunConfig c = base("cylinder-drag", ExperimentKind::DragSweep);
    c.problem.equation = Equation::Stokes;
    c.problem.solution = "none";
    c.problem.forcing = {-1.0, 0.0};
    c.problem.omega = "exterior";
    c.problem.extension = "smooth";
    c.discretization.scheme = "spectral";
    log_band(c, 2);
    c.grids = {1024};
    c.alphas = {1.0};
    c.etas = {10.0};
    c.drag.areas = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    return c;
}

RunConfig nine_ellipses() {
    RunConfig c = base("nine-ellipses", ExperimentKind::DragSweep);
    c.problem.equation = Equation::Stokes;
    c.problem.solution = "none";
    c.problem.forcing = {-1.0, 0.0};
    c.problem.box_length = 4.0;
    c.problem.omega = "exterior";
    c.problem.extension = "smooth";
    // A fixed irregular arrangement of nine ellipses of different sizes,
    // roughly on a 3x3 lattice so neighbours stay well separated.
    c.problem.shapes = {
        ellipse(-1.35, -1.25, 0.30, 0.15, 0.4),  ellipse(-0.05, -1.40, 0.22, 0.12, -0.9),
        ellipse(1.30, -1.10, 0.35, 0.18, 1.3),   ellipse(-1.20, 0.10, 0.18, 0.10, 2.1),
        ellipse(0.15, -0.05, 0.40, 0.20, 0.0),   ellipse(1.40, 0.20, 0.25, 0.09, -0.5),
        ellipse(-1.40, 1.35, 0.26, 0.16, 0.8),   ellipse(0.00, 1.30, 0.15, 0.12, 1.7),
        ellipse(1.25, 1.45, 0.32, 0.14, -1.2),
    };
    c.discretization.scheme = "spectral";
    log_band(c, 1);
    c.grids = {64, 128, 256};
    c.alphas = {1.0};
    c.etas = {10.0};
    return c;
}

RunConfig ns_cylinder(const std::string& name, double reynolds, double t_end, int m1, int m2) {
    RunConfig c = base(name, ExperimentKind::NsRun);
    c.problem.equation = Equation::Brinkman;
    c.problem.solution = "none";
    c.problem.k2 = 1.0;  // unused: the stepper sets the zeroth-order coefficient from the time step
    c.problem.box_length = 8.0;
    c.problem.box_origin = std::array<double, 2>{0.0, 0.0};
    c.problem.shapes = {circle(1.85, 4.0, 0.15)};
    c.problem.omega = "exterior";
    c.problem.extension = "smooth";
    c.discretization.scheme = "spectral";
    fixed_band(c, m1, m2);
    c.grids = {1024};
    c.alphas = {1.0};
    c.etas = {10.0};
    c.ns.reynolds = reynolds;
    c.ns.t_end = t_end;
    c.ns.progress_every = 500;
    return c;
}

}  // namespace

std::vector<RunConfig> builtin_benchmarks() {
    RunConfig re10 = ns_cylinder("ns-re10", 10.0, 144.0, 3, 4);
    re10.ns.average_window = {54.0, 144.0};
    RunConfig re100 = ns_cylinder("ns-re100", 100.0, 234.0, 6, 8);
    re100.ns.transient = 150.0;
    re100.ns.average_window = {150.0, 234.0};
    return {bessel_helmholtz(), starfish_poisson(), exterior_poisson_completion(), neumann_circle(),
            brinkman_manufactured(), eta_sweep(), fd_method2(), cylinder_drag(), nine_ellipses(), re10, re100};
}

std::optional<RunConfig> find_builtin(const std::string& name) {
    for (auto& c : builtin_benchmarks())
        if (c.name == name) return c;
    return std::nullopt;
}

}  // namespace ibdl::tools
