#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ibdl/boundary.hpp"
#include "ibdl/coupling.hpp"
#include "ibdl/grid.hpp"

namespace ibdl {

enum class BandPolicy { Fixed, LogGrowth };

struct InterpolationConfig {
    BandPolicy policy = BandPolicy::Fixed;
    int m1 = 6;  // band width in meshwidths
    int m2 = 8;  // distance of the interior sample from the boundary
    int growth = 2;  // LogGrowth slope per doubling of N

    // Widths used on an N-point grid. LogGrowth gives m1 = growth (log2 N - 4),
    // at least 2, and m2 = m1 + 2.
    int band(int n) const;
    int sample_distance(int n) const;
    void validate() const;

    static InterpolationConfig fixed(int m1, int m2) { return {BandPolicy::Fixed, m1, m2}; }
    static InterpolationConfig log_growth(int growth = 2) { return {BandPolicy::LogGrowth, 2, 4, growth}; }
};

// Distance from every node to the closed polylines through the boundary
// points, computed only out to a reach; nodes further away hold +infinity.
// position holds the periodic image of the node nearest to the polyline.
struct DistanceField {
    std::vector<double> distance;
    std::vector<Vec2> position;
};

DistanceField polyline_distance_field(const ImmersedBoundary& b, const PeriodicGrid& g, double reach);

struct IndicatorMask {
    PeriodicGrid grid;
    std::vector<unsigned char> inside;         // node lies in Omega
    std::vector<unsigned char> near_boundary;  // within band meshwidths of the polyline
    int band = 0;
    DistanceField geometry;                    // filled out to the band

    explicit IndicatorMask(const PeriodicGrid& g) : grid(g), inside(g.size(), 0), near_boundary(g.size(), 0) {}
    std::size_t inside_count() const;
};

// Solves Laplacian(chi) + dipole_spread(1) = 0 with zero mean, shifts by the
// far-field value and thresholds at one half. Normals point out of Omega, so
// inside marks Omega for interior and exterior problems alike.
IndicatorMask compute_indicator(const ImmersedBoundary& b, const PeriodicGrid& g, CouplingKernel kernel,
                                DiffScheme scheme, int band = 0);

// (Re)computes near_boundary for a band given in meshwidths.
void flag_near_boundary(IndicatorMask& mask, const ImmersedBoundary& b, int band);

// Precomputed foot points and interior samples for every flagged Omega node,
// so several fields (vector components, time steps) share the geometry.
class NearBoundaryInterpolator {
public:
    NearBoundaryInterpolator(const ImmersedBoundary& b, const IndicatorMask& mask, int sample_distance);

    ScalarField apply(const ScalarField& u_raw, std::span<const double> boundary_values) const;
    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        std::size_t index;
        std::size_t p1, p2;  // boundary points bracketing the foot point
        double t;            // foot = (1 - t) X[p2] + t X[p1]
        Vec2 sample;         // interior sample point x_B
        double weight_a;     // weight of the boundary value in the final blend
    };
    PeriodicGrid grid_;
    std::size_t n_ib_;
    std::vector<Node> nodes_;
};

ScalarField near_boundary_interpolate(const ScalarField& u_raw, const ImmersedBoundary& b,
                                      std::span<const double> boundary_values, const IndicatorMask& mask,
                                      const InterpolationConfig& cfg);

// Periodic bilinear interpolation of a node field at an arbitrary point.
double bilinear(const ScalarField& u, Vec2 p);

struct RefinementRow {
    int n = 0;
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

struct OrderRow {
    int n_coarse = 0, n_fine = 0;
    std::optional<double> l1, l2, linf;  // empty when undefined
};

std::vector<OrderRow> refinement_table(const std::vector<RefinementRow>& rows);

// Average order over a whole sequence: log2(e_first/e_last) / log2(N_last/N_first).
std::optional<double> overall_order(const std::vector<RefinementRow>& rows, double RefinementRow::*norm);

}  // namespace ibdl
