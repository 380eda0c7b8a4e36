#include "helpers.hpp"
#include "ibdl/krylov.hpp"
#include "ibdl/reference.hpp"

using namespace ibdl;

namespace {

LinearOperator from_dense(const DenseMatrix& a) {
    return {a.rows, [a](std::span<const double> x, std::span<double> y) {
                for (std::size_t i = 0; i < a.rows; ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
                    y[i] = s;
                }
            }};
}

DenseMatrix random_matrix(std::size_t n, unsigned seed, bool symmetric, double shift) {
    const auto v = testing::random_vector(n * n, seed);
    DenseMatrix a{n, n, v};
    if (symmetric)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += shift;
    return a;
}

double relative_residual(const LinearOperator& op, const std::vector<double>& x, const std::vector<double>& b) {
    const auto ax = op(x);
    double r = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        r += (ax[i] - b[i]) * (ax[i] - b[i]);
        nb += b[i] * b[i];
    }
    return std::sqrt(r / nb);
}

}  // namespace

TEST_CASE("MINRES on symmetric indefinite systems", "[krylov]") {
    // Shift 0 leaves eigenvalues of both signs.
    const DenseMatrix a = random_matrix(40, 1, true, 0.0);
    const LinearOperator op = from_dense(a);
    const auto b = testing::random_vector(40, 2);
    const KrylovResult r = minres(op, b, {.tolerance = 1e-10, .max_iterations = 400});
    REQUIRE(r.report.converged);
    CHECK(relative_residual(op, r.solution, b) < 1e-8);
    CHECK(r.report.iterations == static_cast<int>(r.report.residual_history.size()));
    CHECK(r.report.final_residual < 1e-9);
}

TEST_CASE("GMRES on nonsymmetric systems", "[krylov]") {
    const DenseMatrix a = random_matrix(60, 3, false, 12.0);
    const LinearOperator op = from_dense(a);
    const auto b = testing::random_vector(60, 4);

    const KrylovResult full = gmres(op, b, {.tolerance = 1e-10});
    REQUIRE(full.report.converged);
    CHECK(relative_residual(op, full.solution, b) < 1e-9);
    // Residual history is non-increasing for full GMRES.
    for (std::size_t k = 1; k < full.report.residual_history.size(); ++k)
        CHECK(full.report.residual_history[k] <= full.report.residual_history[k - 1] * (1 + 1e-12));

    const KrylovResult restarted = gmres(op, b, {.tolerance = 1e-10, .max_iterations = 2000, .restart = 5});
    REQUIRE(restarted.report.converged);
    CHECK(relative_residual(op, restarted.solution, b) < 1e-9);
    CHECK(restarted.report.iterations >= full.report.iterations);
}

TEST_CASE("GMRES warm start and iteration caps", "[krylov]") {
    const DenseMatrix a = random_matrix(30, 5, false, 8.0);
    const LinearOperator op = from_dense(a);
    const auto b = testing::random_vector(30, 6);
    const KrylovResult first = gmres(op, b, {.tolerance = 1e-12});
    REQUIRE(first.report.converged);

    const KrylovResult warm = gmres(op, b, {.tolerance = 1e-8}, first.solution);
    CHECK(warm.report.converged);
    CHECK(warm.report.iterations == 0);

    const KrylovResult capped = gmres(op, b, {.tolerance = 1e-14, .max_iterations = 3});
    CHECK_FALSE(capped.report.converged);
    CHECK(capped.report.iterations == 3);

    const std::vector<double> zero(30, 0.0);
    const KrylovResult trivial = gmres(op, zero);
    CHECK(trivial.report.converged);
    for (double v : trivial.solution) CHECK(v == 0.0);
}

TEST_CASE("default iteration cap", "[krylov]") { CHECK(default_max_iterations(177) == 2770); }

TEST_CASE("small systems with known solutions", "[krylov]") {
    auto dense = [](std::size_t n, std::vector<double> v) { return from_dense(DenseMatrix{n, n, std::move(v)}); };

    const auto b3 = testing::random_vector(3, 9);
    for (const KrylovResult& r : {gmres(dense(3, {1, 0, 0, 0, 1, 0, 0, 0, 1}), b3), minres(dense(3, {1, 0, 0, 0, 1, 0, 0, 0, 1}), b3)}) {
        CHECK(r.report.iterations <= 1);
        CHECK(testing::max_diff(r.solution, b3) < 1e-12);
    }

    const std::vector<double> d{2, 4, 9};
    for (const KrylovResult& r : {gmres(dense(3, {1, 0, 0, 0, 2, 0, 0, 0, 3}), d), minres(dense(3, {1, 0, 0, 0, 2, 0, 0, 0, 3}), d)}) {
        CHECK(r.report.converged);
        CHECK(r.report.iterations <= 3);
        CHECK(testing::max_diff(r.solution, std::vector<double>{2, 2, 3}) < 1e-10);
    }

    // Symmetric indefinite swap matrix.
    const KrylovResult swap = minres(dense(2, {0, 1, 1, 0}), std::vector<double>{1, -2});
    CHECK(swap.report.converged);
    CHECK(testing::max_diff(swap.solution, std::vector<double>{-2, 1}) < 1e-10);

    const KrylovResult upper = gmres(dense(2, {2, 1, 0, 3}), std::vector<double>{3, 3});
    CHECK(upper.report.converged);
    CHECK(upper.report.iterations <= 2);
    CHECK(testing::max_diff(upper.solution, std::vector<double>{1, 1}) < 1e-10);
}

TEST_CASE("iteration counts stay bounded for a well conditioned family", "[krylov]") {
    // A = I/2 + P/10 with P an orthogonal projector has two eigenvalues, so
    // the count should not grow with n.
    for (std::size_t n : {64u, 256u, 1024u}) {
        const std::size_t k = n / 8;
        std::vector<std::vector<double>> basis;
        for (std::size_t c = 0; c < k; ++c) {
            auto v = testing::random_vector(n, 1000 + static_cast<unsigned>(c));
            for (const auto& q : basis) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += q[i] * v[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q[i];
            }
            double nrm = 0.0;
            for (double x : v) nrm += x * x;
            nrm = std::sqrt(nrm);
            for (double& x : v) x /= nrm;
            basis.push_back(std::move(v));
        }
        const LinearOperator op{n, [&basis, n](std::span<const double> x, std::span<double> y) {
                                    for (std::size_t i = 0; i < n; ++i) y[i] = 0.5 * x[i];
                                    for (const auto& q : basis) {
                                        double dot = 0.0;
                                        for (std::size_t i = 0; i < n; ++i) dot += q[i] * x[i];
                                        for (std::size_t i = 0; i < n; ++i) y[i] += 0.1 * dot * q[i];
                                    }
                                }};
        const auto b = testing::random_vector(n, 77);
        const KrylovResult g = gmres(op, b, {.tolerance = 1e-10});
        const KrylovResult m = minres(op, b, {.tolerance = 1e-10});
        CHECK(g.report.converged);
        CHECK(m.report.converged);
        CHECK(g.report.iterations <= 4);
        CHECK(m.report.iterations <= 4);
        CHECK(relative_residual(op, g.solution, b) < 1e-9);
    }
}

TEST_CASE("full GMRES finishes within the dimension", "[krylov]") {
    for (std::size_t n : {10u, 25u}) {
        const DenseMatrix a = random_matrix(n, 40 + static_cast<unsigned>(n), false, 0.5);
        const auto b = testing::random_vector(n, 41);
        const KrylovResult r = gmres(from_dense(a), b, {.tolerance = 1e-10, .max_iterations = 1000});
        CHECK(r.report.converged);
        CHECK(r.report.iterations <= static_cast<int>(n) + 5);
    }
}
