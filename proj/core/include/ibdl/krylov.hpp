#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ibdl {

// Matrix-free linear map y = A x on R^n.
struct LinearOperator {
    std::size_t dimension = 0;
    std::function<void(std::span<const double> x, std::span<double> y)> apply;

    std::vector<double> operator()(std::span<const double> x) const {
        std::vector<double> y(dimension, 0.0);
        apply(x, y);
        return y;
    }
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;  // relative residual after each iteration
    bool converged = false;
    bool stagnated = false;
    double tolerance = 0.0;
    double final_residual = 0.0;  // true relative residual of the returned iterate
    std::string message;
};

struct KrylovOptions {
    double tolerance = 1e-8;
    int max_iterations = 1000;
    int restart = 0;           // GMRES only; 0 means no restart
    int stagnation_window = 50;
    double stagnation_improvement = 1e-14;
};

struct KrylovResult {
    std::vector<double> solution;
    SolveReport report;
};

KrylovResult minres(const LinearOperator& op, std::span<const double> rhs, const KrylovOptions& opts = {});
// A non-empty initial guess costs one extra operator application.
KrylovResult gmres(const LinearOperator& op, std::span<const double> rhs, const KrylovOptions& opts = {},
                   std::span<const double> initial_guess = {});

// Default iteration cap used by the boundary solvers.
inline int default_max_iterations(std::size_t n_ib) { return static_cast<int>(10 * n_ib + 1000); }

}  // namespace ibdl
