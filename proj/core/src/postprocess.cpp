#include "ibdl/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ibdl/fourier.hpp"

namespace ibdl {

int InterpolationConfig::band(int n) const {
    if (policy == BandPolicy::Fixed) return m1;
    const int log2n = static_cast<int>(std::lround(std::log2(static_cast<double>(n))));
    return std::max(2, growth * (log2n - 4));
}

int InterpolationConfig::sample_distance(int n) const {
    if (policy == BandPolicy::Fixed) return m2;
    return band(n) + 2;
}

void InterpolationConfig::validate() const {
    if (policy == BandPolicy::Fixed && !(m2 > m1 && m1 >= 0))
        throw std::invalid_argument("interpolation needs m2 > m1 >= 0");
    if (policy == BandPolicy::LogGrowth && growth < 1) throw std::invalid_argument("band growth must be positive");
}

std::size_t IndicatorMask::inside_count() const {
    return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), 1));
}

namespace {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * d));
}

// Uniform bucket grid over boundary points for nearest-point queries.
class PointBuckets {
public:
    PointBuckets(const std::vector<Vec2>& pts, double cell) : pts_(pts), cell_(cell) {
        lo_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        Vec2 hi{-lo_.x, -lo_.y};
        for (const Vec2& p : pts) {
            lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        }
        nx_ = static_cast<int>((hi.x - lo_.x) / cell_) + 1;
        ny_ = static_cast<int>((hi.y - lo_.y) / cell_) + 1;
        cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
        for (std::size_t i = 0; i < pts.size(); ++i) cells_[cell_index(pts[i])].push_back(i);
    }

    // The k nearest points, ordered by (distance, index).
    std::vector<std::size_t> nearest(Vec2 q, std::size_t k) const {
        std::vector<std::pair<double, std::size_t>> found;
        const int cx = static_cast<int>(std::floor((q.x - lo_.x) / cell_));
        const int cy = static_cast<int>(std::floor((q.y - lo_.y) / cell_));
        const int max_ring = std::max(nx_, ny_) + std::abs(cx) + std::abs(cy) + 1;
        for (int r = 0; r <= max_ring; ++r) {
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
                    const int ix = cx + dx, iy = cy + dy;
                    if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) continue;
                    for (std::size_t i : cells_[static_cast<std::size_t>(iy) * nx_ + ix])
                        found.emplace_back(norm(pts_[i] - q), i);
                }
            if (found.size() >= k) {
                std::sort(found.begin(), found.end());
                // Anything unexamined lies at least r whole cells away.
                const double guaranteed = r * cell_;
                if (found[k - 1].first <= guaranteed || r == max_ring) break;
            }
        }
        std::sort(found.begin(), found.end());
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < std::min(k, found.size()); ++i) out.push_back(found[i].second);
        return out;
    }

private:
    std::size_t cell_index(Vec2 p) const {
        const int ix = std::clamp(static_cast<int>((p.x - lo_.x) / cell_), 0, nx_ - 1);
        const int iy = std::clamp(static_cast<int>((p.y - lo_.y) / cell_), 0, ny_ - 1);
        return static_cast<std::size_t>(iy) * nx_ + ix;
    }
    const std::vector<Vec2>& pts_;
    double cell_;
    Vec2 lo_;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace

DistanceField polyline_distance_field(const ImmersedBoundary& b, const PeriodicGrid& g, double reach) {
    DistanceField out;
    out.distance.assign(g.size(), std::numeric_limits<double>::infinity());
    out.position.assign(g.size(), Vec2{});
    const double h = g.h();
    const Vec2 o = g.origin();
    for (std::size_t p = 0; p < b.size(); ++p) {
        const Vec2 a = b.points[p];
        const Vec2 c = b.points[b.next(p)];
        const int i0 = static_cast<int>(std::ceil((std::min(a.x, c.x) - reach - o.x) / h));
        const int i1 = static_cast<int>(std::floor((std::max(a.x, c.x) + reach - o.x) / h));
        const int j0 = static_cast<int>(std::ceil((std::min(a.y, c.y) - reach - o.y) / h));
        const int j1 = static_cast<int>(std::floor((std::max(a.y, c.y) + reach - o.y) / h));
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) {
                const Vec2 x{o.x + i * h, o.y + j * h};
                const double d = segment_distance(x, a, c);
                const std::size_t k = g.index(g.wrap(i), g.wrap(j));
                if (d < out.distance[k]) {
                    out.distance[k] = d;
                    out.position[k] = x;
                }
            }
    }
    return out;
}

void flag_near_boundary(IndicatorMask& mask, const ImmersedBoundary& b, int band) {
    mask.band = band;
    std::fill(mask.near_boundary.begin(), mask.near_boundary.end(), 0);
    const double h = mask.grid.h();
    mask.geometry = polyline_distance_field(b, mask.grid, (band + 1) * h);
    if (band <= 0) return;
    const double limit = band * h * (1.0 + 1e-12);
    for (std::size_t k = 0; k < mask.grid.size(); ++k)
        if (mask.geometry.distance[k] <= limit) mask.near_boundary[k] = 1;
}

IndicatorMask compute_indicator(const ImmersedBoundary& b, const PeriodicGrid& g, CouplingKernel kernel,
                                DiffScheme scheme, int band) {
    std::vector<double> ones(b.size(), 1.0);
    ScalarField source = spread_dipole(b, ones, g, kernel, scheme);
    source *= -1.0;
    const ScalarField chi = inv_laplacian_zero_mean(source, scheme, Stencil::Standard5, MeanPolicy::Discard);

    IndicatorMask mask(g);
    flag_near_boundary(mask, b, band);

    // Far-field reference: the box corner unless the boundary comes within
    // the kernel's reach of it, in which case the node farthest from every
    // boundary point (searched on a sub-lattice) is used.
    const double h = g.h();
    const double safe = (kernel.support_radius() + 2) * h;
    auto periodic_gap = [&](Vec2 x) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2& p : b.points) {
            double dx = std::abs(x.x - p.x), dy = std::abs(x.y - p.y);
            dx = std::min(dx, g.length() - dx);
            dy = std::min(dy, g.length() - dy);
            best = std::min(best, std::hypot(dx, dy));
        }
        return best;
    };
    std::size_t ref = g.index(0, 0);
    if (periodic_gap(g.node(0, 0)) < safe) {
        const int stride = std::max(1, g.n() / 64);
        double far = -1.0;
        for (int j = 0; j < g.n(); j += stride)
            for (int i = 0; i < g.n(); i += stride) {
                const double d = periodic_gap(g.node(i, j));
                if (d > far) {
                    far = d;
                    ref = g.index(i, j);
                }
            }
        if (far < safe) throw GeometryError("no node lies far enough from the boundary to fix the indicator level");
    }
    const double level = chi.values[ref];
    // The two plateaus differ by one; decide which one the reference sits on.
    double other_sum = 0.0;
    std::size_t other_count = 0;
    for (double v : chi.values) {
        const double d = v - level;
        if (std::abs(d) >= 0.5) {
            other_sum += d;
            ++other_count;
        }
    }
    const bool reference_in_omega = other_count > 0 && other_sum < 0.0;
    const double shift = reference_in_omega ? 1.0 : 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) mask.inside[k] = (chi.values[k] - level + shift) > 0.5 ? 1 : 0;
    return mask;
}

double bilinear(const ScalarField& u, Vec2 p) {
    const auto& g = u.grid;
    const double sx = (p.x - g.origin().x) / g.h();
    const double sy = (p.y - g.origin().y) / g.h();
    const int i = static_cast<int>(std::floor(sx));
    const int j = static_cast<int>(std::floor(sy));
    const double fx = sx - i, fy = sy - j;
    const int i0 = g.wrap(i), i1 = g.wrap(i + 1), j0 = g.wrap(j), j1 = g.wrap(j + 1);
    return (1 - fx) * (1 - fy) * u(i0, j0) + fx * (1 - fy) * u(i1, j0) + (1 - fx) * fy * u(i0, j1) +
           fx * fy * u(i1, j1);
}

NearBoundaryInterpolator::NearBoundaryInterpolator(const ImmersedBoundary& b, const IndicatorMask& mask,
                                                   int sample_distance)
    : grid_(mask.grid), n_ib_(b.size()) {
    if (mask.band <= 0 || b.size() < 3) return;
    const double h = grid_.h();
    double max_chord = 0.0;
    for (std::size_t p = 0; p < b.size(); ++p) max_chord = std::max(max_chord, norm(b.points[b.next(p)] - b.points[p]));
    PointBuckets buckets(b.points, std::max(h, mask.band * h + max_chord) / 2.0);
    const auto& pts = b.points;

    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (!mask.near_boundary[k] || !mask.inside[k]) continue;
        const Vec2 xp = mask.geometry.position[k];
        auto near = buckets.nearest(xp, 3);
        std::size_t p1 = near[0], p2 = near[1];
        auto project = [&](std::size_t a, std::size_t c) {
            const Vec2 d = pts[a] - pts[c];
            const double len2 = dot(d, d);
            return len2 > 0.0 ? dot(xp - pts[c], d) / len2 : 0.0;
        };
        double t = project(p1, p2);
        if ((t < 0.0 || t > 1.0) && near.size() > 2) {
            // Foot point off the segment: use the two outermost of the three
            // closest points.
            const std::size_t p3 = near[2];
            const double d12 = norm(pts[p1] - pts[p2]), d13 = norm(pts[p1] - pts[p3]), d23 = norm(pts[p2] - pts[p3]);
            if (d13 >= d12 && d13 >= d23) p2 = p3;
            else if (d23 >= d12 && d23 >= d13) p1 = p3;
            t = project(p1, p2);
        }
        t = std::clamp(t, 0.0, 1.0);
        const Vec2 foot = pts[p2] + t * (pts[p1] - pts[p2]);
        Vec2 dir = xp - foot;
        double da = norm(dir);
        if (da <= 1e-12 * h) {
            // Node on the polyline: step along the inward normal.
            const Vec2 n = (1.0 - t) * b.normals[p2] + t * b.normals[p1];
            dir = (-1.0 / norm(n)) * n;
            da = 0.0;
        } else {
            dir = (1.0 / da) * dir;
        }
        const Vec2 xb = foot + (sample_distance * h) * dir;
        const double db = norm(xb - xp);
        nodes_.push_back(Node{k, p1, p2, t, xb, db / (da + db)});
    }
}

ScalarField NearBoundaryInterpolator::apply(const ScalarField& u_raw, std::span<const double> ub) const {
    if (ub.size() != n_ib_) throw std::invalid_argument("boundary values do not match boundary");
    ScalarField out = u_raw;
    for (const Node& nd : nodes_) {
        const double ua = (1.0 - nd.t) * ub[nd.p2] + nd.t * ub[nd.p1];
        const double us = bilinear(u_raw, nd.sample);
        out.values[nd.index] = nd.weight_a * ua + (1.0 - nd.weight_a) * us;
    }
    return out;
}

ScalarField near_boundary_interpolate(const ScalarField& u_raw, const ImmersedBoundary& b,
                                      std::span<const double> boundary_values, const IndicatorMask& mask,
                                      const InterpolationConfig& cfg) {
    cfg.validate();
    const int n = u_raw.grid.n();
    const int band = cfg.band(n);
    if (band <= 0) return u_raw;
    if (mask.band != band) {
        IndicatorMask local = mask;
        flag_near_boundary(local, b, band);
        return NearBoundaryInterpolator(b, local, cfg.sample_distance(n)).apply(u_raw, boundary_values);
    }
    return NearBoundaryInterpolator(b, mask, cfg.sample_distance(n)).apply(u_raw, boundary_values);
}

std::vector<OrderRow> refinement_table(const std::vector<RefinementRow>& rows) {
    if (rows.size() < 2) throw std::invalid_argument("refinement table needs at least two rows");
    std::vector<OrderRow> out;
    auto order = [](double coarse, double fine, double ratio) -> std::optional<double> {
        if (!(coarse > 0.0) || !(fine > 0.0)) return std::nullopt;
        return std::log2(coarse / fine) / std::log2(ratio);
    };
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& c = rows[i - 1];
        const auto& f = rows[i];
        if (f.n <= c.n || (f.n % c.n) != 0 || ((f.n / c.n) & (f.n / c.n - 1)) != 0)
            throw std::invalid_argument("grid sizes must increase by powers of two");
        const double ratio = static_cast<double>(f.n) / c.n;
        out.push_back(OrderRow{c.n, f.n, order(c.l1, f.l1, ratio), order(c.l2, f.l2, ratio),
                               order(c.linf, f.linf, ratio)});
    }
    return out;
}

std::optional<double> overall_order(const std::vector<RefinementRow>& rows, double RefinementRow::*norm_field) {
    if (rows.size() < 2) return std::nullopt;
    const double a = rows.front().*norm_field, z = rows.back().*norm_field;
    if (!(a > 0.0) || !(z > 0.0)) return std::nullopt;
    return std::log2(a / z) / std::log2(static_cast<double>(rows.back().n) / rows.front().n);
}

}  // namespace ibdl
