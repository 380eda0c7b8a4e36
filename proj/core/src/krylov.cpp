#include "ibdl/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ibdl {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double true_relative_residual(const LinearOperator& op, std::span<const double> rhs, std::span<const double> x,
                              double rhs_norm, std::vector<double>* residual_out = nullptr) {
    std::vector<double> r = op(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    const double rel = norm2(r) / rhs_norm;
    if (residual_out) *residual_out = std::move(r);
    return rel;
}

// Tracks the best residual seen and flags a plateau.
class StagnationMonitor {
public:
    StagnationMonitor(int window, double improvement) : window_(window), improvement_(improvement) {}
    bool update(double relres) {
        best_ = std::min(best_, relres);
        bests_.push_back(best_);
        const std::size_t k = bests_.size();
        if (window_ <= 0 || k <= static_cast<std::size_t>(window_)) return false;
        const double then = bests_[k - 1 - window_];
        return then - best_ < improvement_ * then;
    }

private:
    int window_;
    double improvement_;
    double best_ = std::numeric_limits<double>::infinity();
    std::vector<double> bests_;
};

void check_sizes(const LinearOperator& op, std::span<const double> rhs) {
    if (!op.apply) throw std::invalid_argument("linear operator has no apply function");
    if (rhs.size() != op.dimension) throw std::invalid_argument("right-hand side does not match operator dimension");
}

// Accepts an iterate whose recurrence residual claims convergence only if the
// true residual agrees; otherwise the solver restarts from that iterate.
constexpr double kAcceptSlack = 1.0 + 1e-6;
constexpr int kMaxRefinements = 5;

}  // namespace

KrylovResult minres(const LinearOperator& op, std::span<const double> rhs, const KrylovOptions& opts) {
    check_sizes(op, rhs);
    const std::size_t n = op.dimension;
    KrylovResult result{std::vector<double>(n, 0.0), SolveReport{}};
    SolveReport& rep = result.report;
    rep.tolerance = opts.tolerance;
    const double bnorm = norm2(rhs);
    if (bnorm == 0.0) {
        rep.converged = true;
        rep.message = "zero right-hand side";
        return result;
    }
    StagnationMonitor monitor(opts.stagnation_window, opts.stagnation_improvement);
    std::vector<double> residual(rhs.begin(), rhs.end());
    std::vector<double>& x = result.solution;

    for (int pass = 0; pass <= kMaxRefinements && rep.iterations < opts.max_iterations; ++pass) {
        // Paige-Saunders recurrences on the current residual system A d = r.
        const double beta1 = norm2(residual);
        std::vector<double> r1 = residual, r2 = residual, y = residual;
        std::vector<double> w(n, 0.0), w1(n, 0.0), w2(n, 0.0), v(n), d(n, 0.0);
        double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
        double cs = -1.0, sn = 0.0;
        bool local_done = false;
        int local = 0;
        while (rep.iterations < opts.max_iterations) {
            ++rep.iterations;
            ++local;
            const double s = 1.0 / beta;
            for (std::size_t i = 0; i < n; ++i) v[i] = s * y[i];
            op.apply(v, y);
            if (local >= 2) axpy(-beta / oldb, r1, y);
            const double alfa = dot(v, y);
            axpy(-alfa / beta, r2, y);
            r1.swap(r2);
            r2 = y;
            oldb = beta;
            beta = norm2(y);
            const double oldeps = epsln;
            const double delta = cs * dbar + sn * alfa;
            const double gbar = sn * dbar - cs * alfa;
            epsln = sn * beta;
            dbar = -cs * beta;
            double gamma = std::hypot(gbar, beta);
            gamma = std::max(gamma, std::numeric_limits<double>::epsilon());
            cs = gbar / gamma;
            sn = beta / gamma;
            const double ph = cs * phibar;
            phibar = sn * phibar;
            w1.swap(w2);
            w2.swap(w);
            for (std::size_t i = 0; i < n; ++i) w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            axpy(ph, w, d);
            const double relres = phibar / bnorm;
            rep.residual_history.push_back(relres);
            if (relres <= opts.tolerance || beta == 0.0) {
                local_done = true;
                break;
            }
            if (monitor.update(relres)) {
                rep.stagnated = true;
                break;
            }
        }
        axpy(1.0, d, x);
        rep.final_residual = true_relative_residual(op, rhs, x, bnorm, &residual);
        if (rep.final_residual <= opts.tolerance * kAcceptSlack) {
            rep.converged = true;
            break;
        }
        if (rep.stagnated || !local_done) break;
    }
    if (!rep.converged)
        rep.message = rep.stagnated ? "stagnated before reaching tolerance" : "iteration limit reached";
    return result;
}

KrylovResult gmres(const LinearOperator& op, std::span<const double> rhs, const KrylovOptions& opts,
                   std::span<const double> initial_guess) {
    check_sizes(op, rhs);
    if (!initial_guess.empty() && initial_guess.size() != op.dimension)
        throw std::invalid_argument("initial guess has the wrong length");
    const std::size_t n = op.dimension;
    KrylovResult result{std::vector<double>(n, 0.0), SolveReport{}};
    SolveReport& rep = result.report;
    rep.tolerance = opts.tolerance;
    const double bnorm = norm2(rhs);
    if (bnorm == 0.0) {
        rep.converged = true;
        rep.message = "zero right-hand side";
        return result;
    }
    StagnationMonitor monitor(opts.stagnation_window, opts.stagnation_improvement);
    std::vector<double>& x = result.solution;
    std::vector<double> residual(rhs.begin(), rhs.end());
    if (!initial_guess.empty()) {
        x.assign(initial_guess.begin(), initial_guess.end());
        rep.final_residual = true_relative_residual(op, rhs, x, bnorm, &residual);
        if (rep.final_residual <= opts.tolerance) {
            rep.converged = true;
            rep.message = "initial guess already converged";
            return result;
        }
    }
    const int cycle = opts.restart > 0 ? opts.restart : std::max(opts.max_iterations, 1);
    int refinements = 0;

    while (rep.iterations < opts.max_iterations) {
        const double beta = norm2(residual);
        const int m = std::min(cycle, opts.max_iterations - rep.iterations);
        std::vector<std::vector<double>> basis;
        basis.reserve(std::min<std::size_t>(m + 1, n + 1));
        basis.emplace_back(residual);
        for (double& e : basis[0]) e /= beta;
        // Hessenberg columns after rotation (upper triangular part).
        std::vector<std::vector<double>> hcol;
        std::vector<double> cs, sn, g{beta};
        bool local_done = false;
        std::vector<double> w(n);
        for (int j = 0; j < m; ++j) {
            ++rep.iterations;
            op.apply(basis[j], w);
            const double wnorm0 = norm2(w);
            std::vector<double> h(j + 2, 0.0);
            for (int i = 0; i <= j; ++i) {
                h[i] = dot(w, basis[i]);
                axpy(-h[i], basis[i], w);
            }
            double wnorm = norm2(w);
            // Second Gram-Schmidt pass when the first left a visible component
            // along the existing basis.
            double loss = 0.0;
            if (wnorm > 0.0)
                for (int i = 0; i <= j; ++i) loss = std::max(loss, std::abs(dot(w, basis[i])) / wnorm);
            if (loss > 1e-8) {
                for (int i = 0; i <= j; ++i) {
                    const double c = dot(w, basis[i]);
                    h[i] += c;
                    axpy(-c, basis[i], w);
                }
                wnorm = norm2(w);
            }
            h[j + 1] = wnorm;
            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            const double denom = std::hypot(h[j], h[j + 1]);
            const double c = denom == 0.0 ? 1.0 : h[j] / denom;
            const double s = denom == 0.0 ? 0.0 : h[j + 1] / denom;
            cs.push_back(c);
            sn.push_back(s);
            h[j] = c * h[j] + s * h[j + 1];
            h[j + 1] = 0.0;
            g.push_back(-s * g[j]);
            g[j] = c * g[j];
            hcol.push_back(std::move(h));
            const double relres = std::abs(g[j + 1]) / bnorm;
            rep.residual_history.push_back(relres);
            const bool breakdown = wnorm <= 1e-14 * std::max(wnorm0, 1e-300);
            if (relres <= opts.tolerance || breakdown) {
                local_done = true;
                break;
            }
            if (monitor.update(relres)) {
                rep.stagnated = true;
                break;
            }
            basis.emplace_back(w);
            for (double& e : basis.back()) e /= wnorm;
        }
        // Back substitution for the cycle's correction.
        const int k = static_cast<int>(hcol.size());
        std::vector<double> yv(k, 0.0);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int l = i + 1; l < k; ++l) s -= hcol[l][i] * yv[l];
            yv[i] = hcol[i][i] != 0.0 ? s / hcol[i][i] : 0.0;
        }
        for (int i = 0; i < k; ++i) axpy(yv[i], basis[i], x);
        rep.final_residual = true_relative_residual(op, rhs, x, bnorm, &residual);
        if (rep.final_residual <= opts.tolerance * kAcceptSlack) {
            rep.converged = true;
            break;
        }
        if (rep.stagnated) break;
        if (local_done && ++refinements > kMaxRefinements) break;
    }
    if (!rep.converged)
        rep.message = rep.stagnated ? "stagnated before reaching tolerance" : "iteration limit reached";
    return result;
}

}  // namespace ibdl
