#include "ibdl/reference.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ibdl {

double bessel_i2(double x) {
    // I2(x) = sum_k (x/2)^{2k+2} / (k! (k+2)!)
    const double q = 0.25 * x * x;
    double term = q / 2.0;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + 2));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

namespace {

// I2'(x) = I1(x) - 2 I2(x)/x with I1 from its own series.
double bessel_i1(double x) {
    const double q = 0.25 * x * x;
    double term = 0.5 * x;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

std::string to_string(AnalyticKind k) {
    switch (k) {
        case AnalyticKind::BesselHelmholtz: return "bessel-helmholtz";
        case AnalyticKind::PoissonTrig: return "poisson-trig";
        case AnalyticKind::ExpPoisson: return "exp-poisson";
        case AnalyticKind::Linear: return "linear";
        case AnalyticKind::Quadratic: return "quadratic";
    }
    return "?";
}

AnalyticKind parse_analytic_kind(const std::string& s) {
    for (auto k : {AnalyticKind::BesselHelmholtz, AnalyticKind::PoissonTrig, AnalyticKind::ExpPoisson,
                   AnalyticKind::Linear, AnalyticKind::Quadratic})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown analytic solution '" + s + "'");
}

ScalarExact scalar_exact(AnalyticKind kind, double length, double k2) {
    using std::numbers::pi;
    ScalarExact e;
    switch (kind) {
        case AnalyticKind::BesselHelmholtz: {
            const double scale = bessel_i2(length);
            e.k2 = 1.0;
            e.value = [scale](Vec2 p) {
                const double r = norm(p);
                // sin 2 theta = 2xy / r^2, and I2(r) ~ r^2/8 keeps the ratio finite at 0.
                if (r == 0.0) return 0.0;
                return bessel_i2(r) * 2.0 * p.x * p.y / (r * r) / scale;
            };
            e.gradient = [scale](Vec2 p) {
                const double r = norm(p);
                if (r == 0.0) return Vec2{};
                const double th = std::atan2(p.y, p.x);
                const double i2 = bessel_i2(r);
                const double di2 = bessel_i1(r) - 2.0 * i2 / r;
                const double ur = di2 * std::sin(2 * th) / scale;
                const double ut = 2.0 * i2 * std::cos(2 * th) / (r * scale);  // (1/r) du/dtheta
                return Vec2{ur * std::cos(th) - ut * std::sin(th), ur * std::sin(th) + ut * std::cos(th)};
            };
            e.forcing = [](Vec2) { return 0.0; };
            break;
        }
        case AnalyticKind::PoissonTrig: {
            const double a = pi / 2.0;
            e.k2 = 0.0;
            e.value = [a](Vec2 p) { return std::sin(a * p.x) - std::cos(a * p.y); };
            e.gradient = [a](Vec2 p) { return Vec2{a * std::cos(a * p.x), a * std::sin(a * p.y)}; };
            e.forcing = [a](Vec2 p) { return a * a * (std::cos(a * p.y) - std::sin(a * p.x)); };
            break;
        }
        case AnalyticKind::ExpPoisson: {
            const double w = 2.0 * pi / length;
            e.k2 = 0.0;
            e.value = [w](Vec2 p) { return std::exp(std::sin(w * p.x)); };
            e.gradient = [w](Vec2 p) { return Vec2{w * std::cos(w * p.x) * std::exp(std::sin(w * p.x)), 0.0}; };
            e.forcing = [w](Vec2 p) {
                const double s = std::sin(w * p.x), c = std::cos(w * p.x);
                return w * w * std::exp(s) * (c * c - s);
            };
            break;
        }
        case AnalyticKind::Linear:
            e.k2 = k2;
            e.value = [](Vec2 p) { return p.x + p.y; };
            e.gradient = [](Vec2) { return Vec2{1.0, 1.0}; };
            e.forcing = [k2](Vec2 p) { return -k2 * (p.x + p.y); };
            break;
        case AnalyticKind::Quadratic:
            e.k2 = k2;
            e.value = [](Vec2 p) { return p.x * p.x - p.y * p.y; };
            e.gradient = [](Vec2 p) { return Vec2{2.0 * p.x, -2.0 * p.y}; };
            e.forcing = [k2](Vec2 p) { return -k2 * (p.x * p.x - p.y * p.y); };
            break;
    }
    return e;
}

std::string to_string(FlowKind k) { return k == FlowKind::BrinkmanTrig ? "brinkman-trig" : "stokes-exp"; }

FlowKind parse_flow_kind(const std::string& s) {
    if (s == "brinkman-trig") return FlowKind::BrinkmanTrig;
    if (s == "stokes-exp") return FlowKind::StokesExp;
    throw std::invalid_argument("unknown flow solution '" + s + "'");
}

FlowExact flow_exact(FlowKind kind, double mu, double k2, double a) {
    FlowExact e;
    e.mu = mu;
    if (kind == FlowKind::BrinkmanTrig) {
        e.k2 = k2;
        e.velocity = [a](Vec2 p) {
            const double ex = std::exp(std::sin(a * p.x));
            return Vec2{ex * std::cos(a * p.y), -std::cos(a * p.x) * ex * std::sin(a * p.y)};
        };
        e.pressure = [a](Vec2 p) { return std::exp(std::cos(a * p.y)); };
        e.forcing = [a, mu, k2](Vec2 p) {
            const double s = std::sin(a * p.x), c = std::cos(a * p.x), ex = std::exp(s);
            const double lap_u = a * a * (c * c - s - 1.0);  // Laplacian(u) / u
            const double lap_v = a * a * (c * c - 3.0 * s - 2.0);
            const double u = ex * std::cos(a * p.y), v = -c * ex * std::sin(a * p.y);
            const double py = -a * std::sin(a * p.y) * std::exp(std::cos(a * p.y));
            return Vec2{(mu * lap_u - k2) * u, (mu * lap_v - k2) * v - py};
        };
    } else {
        e.k2 = 0.0;
        e.velocity = [](Vec2 p) {
            const double ex = std::exp(p.x * p.y);
            return Vec2{std::sin(p.y) - p.x * ex, std::cos(p.x) + p.y * ex};
        };
        e.pressure = [](Vec2 p) { return std::exp(p.x + p.y); };
        e.forcing = [mu](Vec2 p) {
            const double x = p.x, y = p.y, ex = std::exp(x * y), ep = std::exp(x + y);
            const double lap_u = -std::sin(y) - ex * (2 * y + x * y * y + x * x * x);
            const double lap_v = -std::cos(x) + ex * (2 * x + x * x * y + y * y * y);
            return Vec2{mu * lap_u - ep, mu * lap_v - ep};
        };
    }
    return e;
}

ScalarField sample_field(const PeriodicGrid& g, const std::function<double(Vec2)>& f) {
    ScalarField out(g);
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) out(i, j) = f(g.node(i, j));
    return out;
}

VectorField sample_field(const PeriodicGrid& g, const std::function<Vec2(Vec2)>& f) {
    VectorField out(g);
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            const Vec2 v = f(g.node(i, j));
            out.u(i, j) = v.x;
            out.v(i, j) = v.y;
        }
    return out;
}

std::vector<double> boundary_trace(const ImmersedBoundary& b, const std::function<double(Vec2)>& f) {
    std::vector<double> out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = f(b.points[i]);
    return out;
}

DenseMatrix assemble_dense(const LinearOperator& op) {
    const std::size_t n = op.dimension;
    if (n > kDenseLimit) throw std::length_error("operator too large for dense assembly");
    DenseMatrix m{n, n, std::vector<double>(n * n, 0.0)};
    std::vector<double> e(n, 0.0), col(n);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        op.apply(e, col);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
    }
    return m;
}

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        a.data.data(), static_cast<Eigen::Index>(a.rows), static_cast<Eigen::Index>(a.cols));
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const DenseMatrix& a) {
    if (a.rows != a.cols) throw std::invalid_argument("eigenvalues need a square matrix");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(to_eigen(a), false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue iteration did not converge");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double condition_number(const DenseMatrix& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0.0;
    const double smin = s(s.size() - 1);
    return smin == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / smin;
}

}  // namespace ibdl
