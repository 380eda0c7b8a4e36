#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "ibdl/boundary.hpp"
#include "ibdl/grid.hpp"
#include "ibdl/krylov.hpp"

namespace ibdl {

// Modified Bessel function of the first kind, order 2, from its ascending series.
double bessel_i2(double x);

enum class AnalyticKind { BesselHelmholtz, PoissonTrig, ExpPoisson, Linear, Quadratic };
std::string to_string(AnalyticKind k);
AnalyticKind parse_analytic_kind(const std::string& s);

// Exact solution u of Laplacian(u) - k2 u = g with its gradient.
struct ScalarExact {
    double k2 = 0.0;
    std::function<double(Vec2)> value;
    std::function<Vec2(Vec2)> gradient;
    std::function<double(Vec2)> forcing;
};

// BesselHelmholtz: u = I2(r) sin(2 theta) / I2(boundary_radius), k2 = 1.
// PoissonTrig:     u = sin(pi x/2) - cos(pi y/2), k2 = 0.
// ExpPoisson:      u = exp(sin(2 pi x / L)), k2 = 0.
// Linear:          u = x + y.
// Quadratic:       u = x^2 - y^2 (with the given k2).
// `length` is L for ExpPoisson and the radius for BesselHelmholtz; `k2`
// applies to Linear and Quadratic.
ScalarExact scalar_exact(AnalyticKind kind, double length = 0.25, double k2 = 0.0);

enum class FlowKind {
    BrinkmanTrig,  // u = e^{sin ax} cos ay, v = -cos ax e^{sin ax} sin ay, p = e^{cos ay}
    StokesExp,     // u = sin y - x e^{xy}, v = cos x + y e^{xy}, p = e^{x+y}
};
std::string to_string(FlowKind k);
FlowKind parse_flow_kind(const std::string& s);

// Exact solution of mu Laplacian(u) - k2 u - grad p = g, div u = 0.
struct FlowExact {
    double mu = 1.0;
    double k2 = 0.0;
    std::function<Vec2(Vec2)> velocity;
    std::function<double(Vec2)> pressure;
    std::function<Vec2(Vec2)> forcing;
};

// `wavenumber` is a for BrinkmanTrig (1 gives the manufactured interior
// problem, pi the exterior eta study); StokesExp ignores it and forces k2 = 0.
FlowExact flow_exact(FlowKind kind, double mu = 1.0, double k2 = 1.0, double wavenumber = 1.0);

ScalarField sample_field(const PeriodicGrid& g, const std::function<double(Vec2)>& f);
VectorField sample_field(const PeriodicGrid& g, const std::function<Vec2(Vec2)>& f);
std::vector<double> boundary_trace(const ImmersedBoundary& b, const std::function<double(Vec2)>& f);

// Row-major dense matrix.
struct DenseMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

constexpr std::size_t kDenseLimit = 4096;

// Column j is op applied to the j-th unit vector. Throws beyond kDenseLimit.
DenseMatrix assemble_dense(const LinearOperator& op);

std::vector<std::complex<double>> eigenvalues(const DenseMatrix& a);
double condition_number(const DenseMatrix& a);  // ratio of extreme singular values

}  // namespace ibdl
