#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ibdl/boundary.hpp"
#include "ibdl/coupling.hpp"
#include "ibdl/grid.hpp"
#include "ibdl/krylov.hpp"
#include "ibdl/postprocess.hpp"
#include "ibdl/scalar_solvers.hpp"

namespace ibdl {

// mu Laplacian(u) - k2 u - grad p = g, div u = 0 in Omega, u = U_b on the boundary.
struct FluidProblem {
    PeriodicGrid grid;
    ImmersedBoundary boundary;
    double mu = 1.0;
    double k2 = 0.0;
    VectorField rhs;
    Extension extension = Extension::Zero;
    std::vector<double> ub_x, ub_y;
    double eta = 0.0;
    DiffScheme scheme = DiffScheme::Spectral;
    // Finite differences only: Standard5 is the five-point operator with the
    // five-point pressure solve; Wide uses the wide stencil throughout.
    Stencil stencil = Stencil::Standard5;
    CouplingKernel kernel{};
    InterpolationConfig interpolation = InterpolationConfig::log_growth();
    double tolerance = 1e-8;
    std::optional<int> max_iterations;
    std::optional<IndicatorMask> mask;
    bool interior = true;  // Omega inside the boundary (decides the Stokes mean handling)
    // Double layer only: starting iterate [Qx..., Qy..., (ubar)], e.g. the previous time step.
    std::optional<std::vector<double>> initial_guess;
    // Double layer only: a precomputed copy of ibdl_fluid_operator(*this),
    // e.g. assembled once for a time-stepping loop with a fixed obstacle.
    std::shared_ptr<const LinearOperator> operator_override;

    explicit FluidProblem(const PeriodicGrid& g) : grid(g), rhs(g) {}
    void validate() const;
};

struct FluidSolution {
    VectorField velocity;
    VectorField velocity_raw;
    ScalarField pressure;  // zero mean (per subgrid for the wide stencil)
    ScalarField source;    // S(Q . n) for the double layer, zero otherwise
    std::vector<double> density_x, density_y;
    Vec2 mean_velocity{};
    std::vector<double> unknowns;  // the Krylov solution vector as solved
    SolveReport report;
    IndicatorMask mask;
};

FluidSolution solve_ibsl_brinkman(const FluidProblem& p);
FluidSolution solve_ibsl_stokes(const FluidProblem& p);
FluidSolution solve_ibdl_fluid(const FluidProblem& p);

// Boundary operators on unknowns [Qx..., Qy..., (ubar_x, ubar_y)].
LinearOperator ibsl_fluid_operator(const FluidProblem& p);  // -S* L^-1 P S, k2 > 0
LinearOperator ibdl_fluid_operator(const FluidProblem& p);  // full double-layer operator incl. mean rows if any

struct ForceTorque {
    Vec2 force;
    double torque = 0.0;
};

enum class ForceMethod { SingleLayer, CompletedDoubleLayer };

// B = -int F ds (single layer) or -eta int Q ds (completed double layer);
// torque -int (x - c) x density with the same factor.
ForceTorque net_force_torque(std::span<const double> density_x, std::span<const double> density_y,
                             const ImmersedBoundary& b, ForceMethod method, double eta = 0.0, Vec2 center = {});

// Largest |div u_raw + source| with the modes the discrete divergence cannot
// reach removed from the source.
double divergence_residual(const VectorField& velocity_raw, const ScalarField& source, DiffScheme scheme);

}  // namespace ibdl
