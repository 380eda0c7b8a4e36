#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ibdl/boundary.hpp"
#include "ibdl/fluid_solvers.hpp"
#include "ibdl/grid.hpp"
#include "ibdl/postprocess.hpp"

namespace ibdl {

enum class NSMethod { IBDL, IBSL };
std::string to_string(NSMethod m);
NSMethod parse_ns_method(const std::string& s);

// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Box {
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    bool contains_strictly(Vec2 p) const { return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1; }
};

struct NSConfig {
    PeriodicGrid grid;
    ImmersedBoundary obstacle;
    double reference_length = 0.15;  // R in the force coefficients
    double rho = 1.0;
    double mu = 0.03;
    double dt = 1.8e-3;
    double u_inf = 1.0;
    int strip_width = 4;  // meshwidths reset to the inflow state
    double eta = 10.0;
    InterpolationConfig interpolation = InterpolationConfig::fixed(3, 4);
    NSMethod method = NSMethod::IBDL;
    Box control_box{0.5, 3.203125, 2.8125, 5.1875};
    DiffScheme scheme = DiffScheme::Spectral;
    CouplingKernel kernel{};
    double tolerance = 1e-8;
    bool nonlinear = true;  // false drops the advection terms (linear regime)
    // Assemble the double-layer boundary operator densely once and reuse it on
    // every BDF2 step. The obstacle is fixed, so the operator never changes.
    bool cache_boundary_operator = true;

    explicit NSConfig(const PeriodicGrid& g) : grid(g) {}
    void validate() const;

    // Cylinder of radius 0.15 at (1.85, 4) in [0, 8]^2 with mu = 2 r rho u_inf / Re.
    static NSConfig cylinder(double reynolds, int n, double alpha = 1.0);
};

struct NSState {
    VectorField u_now;
    VectorField u_prev;
    double time = 0.0;
    int step_index = 0;  // number of completed steps; 0 means the next step is the bootstrap step
};

struct StepRecord {
    int step = 0;
    double time = 0.0;
    double drag = 0.0;  // C_D
    double lift = 0.0;  // C_L
    int iterations = 0;
    bool converged = false;
    double divergence_residual = 0.0;
    double max_velocity = 0.0;
};

struct TimeSeries {
    std::vector<StepRecord> records;
};

struct VelocityGradient {
    ScalarField ux, uy, vx, vy;
};

VelocityGradient velocity_gradient(const VectorField& u, DiffScheme scheme);

// Overwrites (u, v) = (u_inf, 0) on the leftmost strip_width columns.
VectorField apply_inflow_strip(VectorField u, const NSConfig& cfg);

// Net force on the obstacle from a momentum balance over the control box:
// -int_{box n Omega} rho u_t + int_{box edges} (sigma - rho u u^T) n.
// u_t uses the stepper's difference: BDF2, or backward Euler when bootstrap is set.
Vec2 control_box_force(const VectorField& u_new, const VectorField& u_now, const VectorField& u_prev,
                       const ScalarField& pressure, const IndicatorMask& mask, const NSConfig& cfg, bool bootstrap,
                       const VelocityGradient* gradient_of_new = nullptr);

// Keeps the indicator, the previous advection term and the previous boundary
// density between steps. Stepping is sequential.
class NavierStokesStepper {
public:
    explicit NavierStokesStepper(NSConfig cfg);

    const NSConfig& config() const { return cfg_; }
    const IndicatorMask& mask() const { return mask_; }
    NSState initial_state() const;

    // Advances one step. Throws std::runtime_error naming the step when the
    // Krylov solve fails.
    NSState step(const NSState& s, StepRecord* record = nullptr);

    // Pressure and raw fields of the most recent step.
    const FluidSolution* last_solution() const { return last_ ? &*last_ : nullptr; }

private:
    VectorField advection(const VectorField& u, const VelocityGradient& grad) const;
    FluidProblem brinkman_problem(double k2) const;

    NSConfig cfg_;
    IndicatorMask mask_;
    std::optional<VectorField> prev_advection_;
    int prev_advection_step_ = -1;
    std::optional<VelocityGradient> grad_now_;
    int grad_step_ = -1;
    std::shared_ptr<const LinearOperator> cached_operator_;
    std::optional<FluidSolution> last_;
};

// One step with a fresh stepper.
NSState imex_step(const NSState& s, const NSConfig& cfg);

// Runs to a step count, calling on_step after every step (return false to stop early).
TimeSeries run_navier_stokes(NavierStokesStepper& stepper, NSState& state, int steps,
                             const std::function<bool(const StepRecord&, const NSState&)>& on_step = {});

// Strouhal number 2 R f / u_inf from the lift history. The shedding period is
// the mean spacing of strict local maxima above the median (refined by a
// parabola through each peak). Needs at least three peaks and a lift
// variation above 1e-9 relative, otherwise the history counts as flat.
double strouhal(std::span<const double> time, std::span<const double> lift, double u_inf, double reference_length);

// Mean drag over records with time in [t0, t1].
double mean_drag(const TimeSeries& series, double t0, double t1);

}  // namespace ibdl
