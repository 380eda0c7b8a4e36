#pragma once

#include <optional>
#include <vector>

#include "ibdl/boundary.hpp"
#include "ibdl/coupling.hpp"
#include "ibdl/grid.hpp"
#include "ibdl/krylov.hpp"
#include "ibdl/postprocess.hpp"

namespace ibdl {

// How the right-hand side is continued outside Omega.
enum class Extension {
    Zero,         // zero outside Omega
    Smooth,       // the supplied field is used everywhere
    MeanBalance,  // constant outside Omega chosen so the total integral vanishes
};

std::string to_string(Extension e);
Extension parse_extension(const std::string& s);

// Builds the extended right-hand side from a field sampled on the whole grid.
ScalarField extend_rhs(const ScalarField& g, const IndicatorMask& mask, Extension ext);

// Operator is Laplacian - k2 (unit diffusion coefficient).
struct ScalarProblem {
    PeriodicGrid grid;
    ImmersedBoundary boundary;
    double k2 = 0.0;
    ScalarField rhs;  // g sampled on every node
    Extension extension = Extension::Zero;
    std::optional<std::vector<double>> dirichlet;
    std::optional<std::vector<double>> neumann;
    DiffScheme scheme = DiffScheme::FiniteDifference;
    CouplingKernel kernel{};
    double eta = 0.0;
    InterpolationConfig interpolation{};
    double tolerance = 1e-8;
    std::optional<int> max_iterations;  // default 10 N_IB + 1000
    std::optional<IndicatorMask> mask;  // computed on demand when absent

    explicit ScalarProblem(const PeriodicGrid& g) : grid(g), rhs(g) {}
    void validate() const;
};

struct ScalarSolution {
    ScalarField u;      // after near-boundary interpolation (IBDL) or equal to u_raw (IBSL)
    ScalarField u_raw;
    std::vector<double> density;  // F (IBSL), Q (IBDL) or recovered boundary values (Neumann)
    double mean_correction = 0.0;
    SolveReport report;
    IndicatorMask mask;
};

ScalarSolution solve_ibsl_helmholtz(const ScalarProblem& p);
ScalarSolution solve_ibsl_poisson(const ScalarProblem& p);
ScalarSolution solve_ibdl_scalar(const ScalarProblem& p);
ScalarSolution solve_ibdl_neumann(const ScalarProblem& p);

// The boundary operators the Krylov solvers see, exposed for inspection and
// dense comparison. Unknowns are ordered [density..., mean correction].
LinearOperator ibsl_scalar_operator(const ScalarProblem& p);   // -S* L^-1 S (no scaling, k2 > 0)
LinearOperator ibdl_scalar_operator(const ScalarProblem& p);   // -S* L^-1 (S~ + eta S) + I/2 (k2 > 0 or eta = 0)
LinearOperator ibdl_neumann_operator(const ScalarProblem& p);  // -S* L^-1 S~ - I/2

}  // namespace ibdl
