#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibdl {

class FourierPlans;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(Vec2 b) {
        x += b.x;
        y += b.y;
        return *this;
    }
    Vec2& operator-=(Vec2 b) {
        x -= b.x;
        y -= b.y;
        return *this;
    }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

// Raised when a Poisson-type inverse is asked to invert data outside the range
// of the periodic Laplacian.
class SolvabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DiffScheme { Spectral, FiniteDifference };
enum class Stencil { Standard5, Wide };

std::string to_string(DiffScheme s);
DiffScheme parse_scheme(const std::string& s);

// Uniform N x N periodic node-centred mesh on a square box. Copies are cheap
// and share the transform plans, which are immutable once built.
class PeriodicGrid {
public:
    PeriodicGrid(int n, double length, Vec2 origin);
    // Centred box [-L/2, L/2]^2.
    PeriodicGrid(int n, double length);

    int n() const { return n_; }
    double length() const { return length_; }
    Vec2 origin() const { return origin_; }
    double h() const { return length_ / n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

    double x(int i) const { return origin_.x + i * h(); }
    double y(int j) const { return origin_.y + j * h(); }
    Vec2 node(int i, int j) const { return {x(i), y(j)}; }
    // Storage is row-major in j with i (the x index) contiguous.
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * n_ + static_cast<std::size_t>(i);
    }
    int wrap(int i) const {
        int r = i % n_;
        return r < 0 ? r + n_ : r;
    }

    const FourierPlans& plans() const { return *plans_; }
    bool same_as(const PeriodicGrid& o) const {
        return n_ == o.n_ && length_ == o.length_ && origin_.x == o.origin_.x && origin_.y == o.origin_.y;
    }

private:
    int n_;
    double length_;
    Vec2 origin_;
    std::shared_ptr<const FourierPlans> plans_;
};

struct ScalarField {
    PeriodicGrid grid;
    std::vector<double> values;

    explicit ScalarField(const PeriodicGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    ScalarField(const PeriodicGrid& g, std::vector<double> v);

    double& operator()(int i, int j) { return values[grid.index(i, j)]; }
    double operator()(int i, int j) const { return values[grid.index(i, j)]; }
    double mean() const;
    double max_abs() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

struct VectorField {
    ScalarField u;
    ScalarField v;

    explicit VectorField(const PeriodicGrid& g) : u(g), v(g) {}
    VectorField(ScalarField a, ScalarField b);
    const PeriodicGrid& grid() const { return u.grid; }
    double max_abs() const;
};

// Samples f(x, y) at every node.
template <class F>
ScalarField sample(const PeriodicGrid& g, F&& f) {
    ScalarField out(g);
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) out(i, j) = f(g.x(i), g.y(j));
    return out;
}

// Which discrete Laplacian the mean-zero pressure-type inverses use.
// Consistent means divergence composed with gradient of the active scheme,
// which is the Wide stencil for finite differences.
enum class PressureLaplacian { Consistent, Standard5 };

ScalarField laplacian(const ScalarField& f, DiffScheme scheme, Stencil stencil = Stencil::Standard5);
VectorField gradient(const ScalarField& f, DiffScheme scheme);
ScalarField divergence(const VectorField& v, DiffScheme scheme);
ScalarField derivative_x(const ScalarField& f, DiffScheme scheme);
ScalarField derivative_y(const ScalarField& f, DiffScheme scheme);

enum class MeanPolicy {
    Check,    // reject data outside the range (solvability error)
    Discard,  // silently drop the unreachable modes
};

ScalarField inv_laplacian_zero_mean(const ScalarField& f, DiffScheme scheme, Stencil stencil = Stencil::Standard5,
                                    MeanPolicy policy = MeanPolicy::Check);
ScalarField helmholtz_inverse(const ScalarField& f, double mu, double k2, DiffScheme scheme,
                              Stencil stencil = Stencil::Standard5, MeanPolicy policy = MeanPolicy::Check);
VectorField leray_project(const VectorField& v, DiffScheme scheme, Stencil stencil = Stencil::Wide);

// Mean over each of the four interleaved subgrids (i mod 2, j mod 2).
std::array<double, 4> subgrid_means(const ScalarField& f);

// Relative tolerance for solvability checks: |mean f| <= tol * max|f|.
inline constexpr double kSolvabilityTol = 1e-10;

struct IndicatorMask;

struct Norms {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
};

// Area-scaled discrete norms restricted to the selected nodes.
Norms masked_norms(const ScalarField& err, std::span<const unsigned char> selected);
Norms masked_norms(const ScalarField& err, const IndicatorMask& mask);

}  // namespace ibdl
