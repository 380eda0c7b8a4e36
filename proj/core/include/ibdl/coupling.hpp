#pragma once

#include <span>
#include <string>
#include <vector>

#include "ibdl/boundary.hpp"
#include "ibdl/grid.hpp"

namespace ibdl {

enum class KernelKind { Peskin4, BSpline6 };

std::string to_string(KernelKind k);
KernelKind parse_kernel(const std::string& s);

// One-dimensional profile of the regularised delta function.
double phi(double r, KernelKind kind);

struct CouplingKernel {
    KernelKind kind = KernelKind::Peskin4;
    int support_radius() const { return kind == KernelKind::Peskin4 ? 2 : 3; }
    double operator()(double r) const { return phi(r, kind); }
};

// Precomputed tensor-product weights linking one boundary to one grid. The
// object is immutable after construction and can be shared across threads.
class Coupler {
public:
    Coupler(const ImmersedBoundary& b, const PeriodicGrid& g, CouplingKernel kernel);

    const PeriodicGrid& grid() const { return grid_; }
    const ImmersedBoundary& boundary() const { return boundary_; }
    CouplingKernel kernel() const { return kernel_; }
    std::size_t size() const { return boundary_.size(); }

    // S: sum_i F_i delta_h(x - X_i) ds_i, accumulated in point order.
    void spread_into(std::span<const double> F, ScalarField& out) const;
    ScalarField spread(std::span<const double> F) const;
    // S*: sum over nodes of u delta_h(x - X_i) dx dy.
    std::vector<double> interpolate(const ScalarField& u) const;

private:
    PeriodicGrid grid_;
    ImmersedBoundary boundary_;
    CouplingKernel kernel_;
    int width_;
    std::vector<int> base_i_, base_j_;   // first stencil node per point (unwrapped)
    std::vector<double> wx_, wy_;        // width_ weights per point
};

ScalarField spread(const ImmersedBoundary& b, std::span<const double> F, const PeriodicGrid& g,
                   CouplingKernel kernel);
std::vector<double> interpolate(const ScalarField& u, const ImmersedBoundary& b, CouplingKernel kernel);

// Dipole spread: divergence of the spread of Q n, using the solver's scheme.
ScalarField spread_dipole(const ImmersedBoundary& b, std::span<const double> Q, const PeriodicGrid& g,
                          CouplingKernel kernel, DiffScheme scheme);

struct TensorDipole {
    VectorField force;   // mu * div(S A), A_ij = Q_i n_j + Q_j n_i
    ScalarField source;  // S(Q . n)
};

TensorDipole spread_tensor_dipole(const ImmersedBoundary& b, std::span<const double> Qx, std::span<const double> Qy,
                                  double mu, const PeriodicGrid& g, CouplingKernel kernel, DiffScheme scheme);

}  // namespace ibdl
