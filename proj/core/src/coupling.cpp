#include "ibdl/coupling.hpp"

#include <cmath>
#include <stdexcept>

namespace ibdl {

std::string to_string(KernelKind k) { return k == KernelKind::Peskin4 ? "peskin4" : "bspline6"; }

KernelKind parse_kernel(const std::string& s) {
    if (s == "peskin4") return KernelKind::Peskin4;
    if (s == "bspline6") return KernelKind::BSpline6;
    throw std::invalid_argument("unknown kernel '" + s + "' (expected peskin4 or bspline6)");
}

double phi(double r, KernelKind kind) {
    const double a = std::abs(r);
    if (kind == KernelKind::Peskin4) {
        if (a <= 1.0) return (3.0 - 2.0 * a + std::sqrt(1.0 + 4.0 * a - 4.0 * a * a)) / 8.0;
        if (a <= 2.0) return (5.0 - 2.0 * a - std::sqrt(std::max(0.0, -7.0 + 12.0 * a - 4.0 * a * a))) / 8.0;
        return 0.0;
    }
    const double a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a;
    if (a <= 1.0) return 11.0 / 20.0 - a2 / 2.0 + a4 / 4.0 - a5 / 12.0;
    if (a <= 2.0)
        return 17.0 / 40.0 + 5.0 * a / 8.0 - 7.0 * a2 / 4.0 + 5.0 * a3 / 4.0 - 3.0 * a4 / 8.0 + a5 / 24.0;
    if (a < 3.0) return 81.0 / 40.0 - 27.0 * a / 8.0 + 9.0 * a2 / 4.0 - 3.0 * a3 / 4.0 + a4 / 8.0 - a5 / 120.0;
    return 0.0;
}

Coupler::Coupler(const ImmersedBoundary& b, const PeriodicGrid& g, CouplingKernel kernel)
    : grid_(g), boundary_(b), kernel_(kernel), width_(2 * kernel.support_radius()) {
    if (g.n() < 2 * kernel.support_radius() + 1) throw std::invalid_argument("grid too small for kernel support");
    const std::size_t n = b.size();
    base_i_.resize(n);
    base_j_.resize(n);
    wx_.resize(n * width_);
    wy_.resize(n * width_);
    const double h = g.h();
    const int sr = kernel.support_radius();
    for (std::size_t p = 0; p < n; ++p) {
        const double sx = (b.points[p].x - g.origin().x) / h;
        const double sy = (b.points[p].y - g.origin().y) / h;
        const int fx = static_cast<int>(std::floor(sx));
        const int fy = static_cast<int>(std::floor(sy));
        base_i_[p] = fx - sr + 1;
        base_j_[p] = fy - sr + 1;
        for (int k = 0; k < width_; ++k) {
            wx_[p * width_ + k] = phi(base_i_[p] + k - sx, kernel.kind);
            wy_[p * width_ + k] = phi(base_j_[p] + k - sy, kernel.kind);
        }
    }
}

void Coupler::spread_into(std::span<const double> F, ScalarField& out) const {
    if (F.size() != size()) throw std::invalid_argument("density length does not match boundary");
    const double inv_area = 1.0 / (grid_.h() * grid_.h());
    const int n = grid_.n();
    for (std::size_t p = 0; p < size(); ++p) {
        const double strength = F[p] * boundary_.weights[p] * inv_area;
        if (strength == 0.0) continue;
        const double* wx = &wx_[p * width_];
        const double* wy = &wy_[p * width_];
        for (int b = 0; b < width_; ++b) {
            const int j = grid_.wrap(base_j_[p] + b);
            const double sy = strength * wy[b];
            double* row = &out.values[static_cast<std::size_t>(j) * n];
            for (int a = 0; a < width_; ++a) row[grid_.wrap(base_i_[p] + a)] += sy * wx[a];
        }
    }
}

ScalarField Coupler::spread(std::span<const double> F) const {
    ScalarField out(grid_);
    spread_into(F, out);
    return out;
}

std::vector<double> Coupler::interpolate(const ScalarField& u) const {
    std::vector<double> out(size(), 0.0);
    const int n = grid_.n();
    for (std::size_t p = 0; p < size(); ++p) {
        const double* wx = &wx_[p * width_];
        const double* wy = &wy_[p * width_];
        double acc = 0.0;
        for (int b = 0; b < width_; ++b) {
            const int j = grid_.wrap(base_j_[p] + b);
            const double* row = &u.values[static_cast<std::size_t>(j) * n];
            double line = 0.0;
            for (int a = 0; a < width_; ++a) line += row[grid_.wrap(base_i_[p] + a)] * wx[a];
            acc += line * wy[b];
        }
        out[p] = acc;
    }
    return out;
}

ScalarField spread(const ImmersedBoundary& b, std::span<const double> F, const PeriodicGrid& g,
                   CouplingKernel kernel) {
    return Coupler(b, g, kernel).spread(F);
}

std::vector<double> interpolate(const ScalarField& u, const ImmersedBoundary& b, CouplingKernel kernel) {
    return Coupler(b, u.grid, kernel).interpolate(u);
}

ScalarField spread_dipole(const ImmersedBoundary& b, std::span<const double> Q, const PeriodicGrid& g,
                          CouplingKernel kernel, DiffScheme scheme) {
    if (b.normals.size() != b.size()) throw std::invalid_argument("dipole spreading needs normals");
    Coupler c(b, g, kernel);
    std::vector<double> qx(b.size()), qy(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        qx[i] = Q[i] * b.normals[i].x;
        qy[i] = Q[i] * b.normals[i].y;
    }
    return divergence(VectorField(c.spread(qx), c.spread(qy)), scheme);
}

TensorDipole spread_tensor_dipole(const ImmersedBoundary& b, std::span<const double> Qx, std::span<const double> Qy,
                                  double mu, const PeriodicGrid& g, CouplingKernel kernel, DiffScheme scheme) {
    if (b.normals.size() != b.size()) throw std::invalid_argument("dipole spreading needs normals");
    Coupler c(b, g, kernel);
    const std::size_t n = b.size();
    std::vector<double> a11(n), a12(n), a22(n), qn(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 nn = b.normals[i];
        a11[i] = 2.0 * Qx[i] * nn.x;
        a12[i] = Qx[i] * nn.y + Qy[i] * nn.x;
        a22[i] = 2.0 * Qy[i] * nn.y;
        qn[i] = Qx[i] * nn.x + Qy[i] * nn.y;
    }
    ScalarField s11 = c.spread(a11), s12 = c.spread(a12), s22 = c.spread(a22);
    ScalarField fx = derivative_x(s11, scheme) + derivative_y(s12, scheme);
    ScalarField fy = derivative_x(s12, scheme) + derivative_y(s22, scheme);
    fx *= mu;
    fy *= mu;
    return TensorDipole{VectorField(std::move(fx), std::move(fy)), c.spread(qn)};
}

}  // namespace ibdl
