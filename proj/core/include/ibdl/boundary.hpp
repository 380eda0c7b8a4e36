#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ibdl/grid.hpp"

namespace ibdl {

enum class Orientation { InteriorIsOmega, ExteriorIsOmega };

// Lagrangian point set. Several closed curves may be stored back to back;
// curve_starts marks where each begins. Normals point out of the PDE domain.
struct ImmersedBoundary {
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<Vec2> normals;
    std::vector<std::size_t> curve_starts{0};
    bool closed = true;

    std::size_t size() const { return points.size(); }
    double total_length() const;
    std::size_t curve_count() const { return curve_starts.size(); }
    std::size_t curve_begin(std::size_t c) const { return curve_starts[c]; }
    std::size_t curve_end(std::size_t c) const {
        return c + 1 < curve_starts.size() ? curve_starts[c + 1] : points.size();
    }
    // Neighbours along the owning closed curve.
    std::size_t next(std::size_t i) const;
    std::size_t prev(std::size_t i) const;
    // Index of the curve containing point i.
    std::size_t curve_of(std::size_t i) const;
};

struct Circle {
    Vec2 center;
    double radius = 0.0;
};

struct Ellipse {
    Vec2 center;
    double semi_a = 0.0;
    double semi_b = 0.0;
    double rotation = 0.0;  // radians, counterclockwise
};

// Five-armed curve r(t) = scale * (1 + sin(10 pi t)/4), t in [0, 1).
struct Starfish {
    Vec2 center;
    double scale = 1.0;
};

struct PointList {
    std::vector<Vec2> points;
    std::optional<std::vector<Vec2>> normals;
};

struct ShapeSpec {
    std::variant<Circle, Ellipse, Starfish, PointList> geometry;
    Orientation orientation = Orientation::InteriorIsOmega;
};

// Points equally spaced in arclength with N_IB = round(L_IB / (alpha * h)).
ImmersedBoundary discretize(const ShapeSpec& shape, const PeriodicGrid& grid, double alpha);

// Several disjoint shapes as one boundary record.
ImmersedBoundary concatenate(const std::vector<ImmersedBoundary>& parts);

// Chord-based normals n_i ~ rot(-90)(X_{i+1} - X_{i-1}) for a counterclockwise
// curve enclosing its interior; negated when Omega is the exterior.
std::vector<Vec2> approximate_normals(const std::vector<Vec2>& points, Orientation orientation);

// Weight of point i is half the sum of its two adjacent chords.
std::vector<double> arclength_weights(const std::vector<Vec2>& points);

// Reads rows "x y [nx ny]"; blank lines and lines starting with '#' are skipped.
PointList read_point_list(const std::filesystem::path& path);

// Signed area of a closed polygon (positive for counterclockwise order).
double signed_area(const std::vector<Vec2>& points);

}  // namespace ibdl
