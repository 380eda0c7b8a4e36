#include "ibdl/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace ibdl {

double ImmersedBoundary::total_length() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

std::size_t ImmersedBoundary::curve_of(std::size_t i) const {
    auto it = std::upper_bound(curve_starts.begin(), curve_starts.end(), i);
    return static_cast<std::size_t>(it - curve_starts.begin()) - 1;
}

std::size_t ImmersedBoundary::next(std::size_t i) const {
    const std::size_t c = curve_of(i);
    return i + 1 == curve_end(c) ? curve_begin(c) : i + 1;
}

std::size_t ImmersedBoundary::prev(std::size_t i) const {
    const std::size_t c = curve_of(i);
    return i == curve_begin(c) ? curve_end(c) - 1 : i - 1;
}

double signed_area(const std::vector<Vec2>& p) {
    double a = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) a += cross(p[i], p[(i + 1) % p.size()]);
    return 0.5 * a;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ParametricCurve {
    std::function<Vec2(double)> position;  // t in [0, 1), counterclockwise
    std::function<Vec2(double)> tangent;   // d position / dt
};

int point_count(double length, double alpha, double h) {
    const long n = std::lround(length / (alpha * h));
    if (n < 3) throw GeometryError("boundary would have fewer than 3 points");
    return static_cast<int>(n);
}

// Arclength-uniform resampling through a dense table of cumulative chord
// lengths, inverted by linear interpolation in the parameter.
ImmersedBoundary resample(const ParametricCurve& curve, double alpha, double h) {
    auto table = [&](int samples) {
        std::vector<double> cum(samples + 1, 0.0);
        Vec2 prev = curve.position(0.0);
        for (int k = 1; k <= samples; ++k) {
            const Vec2 p = curve.position(static_cast<double>(k) / samples);
            cum[k] = cum[k - 1] + norm(p - prev);
            prev = p;
        }
        return cum;
    };
    int samples = 1 << 16;
    std::vector<double> cum = table(samples);
    int n_ib = point_count(cum.back(), alpha, h);
    if (samples < 64 * n_ib) {
        samples = 64 * n_ib;
        cum = table(samples);
        n_ib = point_count(cum.back(), alpha, h);
    }
    const double length = cum.back();
    ImmersedBoundary b;
    b.points.resize(n_ib);
    b.normals.resize(n_ib);
    b.weights.assign(n_ib, length / n_ib);
    std::size_t k = 0;
    for (int i = 0; i < n_ib; ++i) {
        const double target = length * i / n_ib;
        while (k + 1 < cum.size() - 1 && cum[k + 1] < target) ++k;
        const double span = cum[k + 1] - cum[k];
        const double frac = span > 0.0 ? (target - cum[k]) / span : 0.0;
        const double t = (static_cast<double>(k) + frac) / samples;
        b.points[i] = curve.position(t);
        const Vec2 tan = curve.tangent(t);
        const double len = norm(tan);
        b.normals[i] = {tan.y / len, -tan.x / len};
    }
    return b;
}

void check_inside_box(const ImmersedBoundary& b, const PeriodicGrid& g) {
    const Vec2 lo = g.origin();
    const double l = g.length();
    for (const Vec2& p : b.points)
        if (!(p.x > lo.x && p.x < lo.x + l && p.y > lo.y && p.y < lo.y + l))
            throw GeometryError("boundary point lies on or outside the computational box");
}

Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

}  // namespace

ImmersedBoundary discretize(const ShapeSpec& shape, const PeriodicGrid& grid, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("spacing ratio alpha must be positive");
    const double h = grid.h();
    ImmersedBoundary b;
    if (const auto* c = std::get_if<Circle>(&shape.geometry)) {
        if (!(c->radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
        const double length = kTwoPi * c->radius;
        const int n_ib = point_count(length, alpha, h);
        b.points.resize(n_ib);
        b.normals.resize(n_ib);
        b.weights.assign(n_ib, length / n_ib);
        for (int i = 0; i < n_ib; ++i) {
            const double th = kTwoPi * i / n_ib;
            b.normals[i] = {std::cos(th), std::sin(th)};
            b.points[i] = c->center + c->radius * b.normals[i];
        }
    } else if (const auto* e = std::get_if<Ellipse>(&shape.geometry)) {
        if (!(e->semi_a > 0.0 && e->semi_b > 0.0)) throw std::invalid_argument("ellipse semi-axes must be positive");
        const Ellipse el = *e;
        ParametricCurve curve{
            [el](double t) {
                return el.center + rotate({el.semi_a * std::cos(kTwoPi * t), el.semi_b * std::sin(kTwoPi * t)},
                                          el.rotation);
            },
            [el](double t) {
                return rotate({-kTwoPi * el.semi_a * std::sin(kTwoPi * t), kTwoPi * el.semi_b * std::cos(kTwoPi * t)},
                              el.rotation);
            }};
        b = resample(curve, alpha, h);
    } else if (const auto* s = std::get_if<Starfish>(&shape.geometry)) {
        if (!(s->scale > 0.0)) throw std::invalid_argument("starfish scale must be positive");
        const Starfish sf = *s;
        ParametricCurve curve{
            [sf](double t) {
                const double r = sf.scale * (1.0 + std::sin(10.0 * std::numbers::pi * t) / 4.0);
                return sf.center + Vec2{r * std::cos(kTwoPi * t), r * std::sin(kTwoPi * t)};
            },
            [sf](double t) {
                const double r = sf.scale * (1.0 + std::sin(10.0 * std::numbers::pi * t) / 4.0);
                const double dr = sf.scale * 10.0 * std::numbers::pi * std::cos(10.0 * std::numbers::pi * t) / 4.0;
                const double c = std::cos(kTwoPi * t), sn = std::sin(kTwoPi * t);
                return Vec2{dr * c - kTwoPi * r * sn, dr * sn + kTwoPi * r * c};
            }};
        b = resample(curve, alpha, h);
    } else {
        const auto& pl = std::get<PointList>(shape.geometry);
        b.points = pl.points;
        b.weights = arclength_weights(pl.points);
        if (pl.normals) {
            if (pl.normals->size() != pl.points.size())
                throw std::invalid_argument("point list normals do not match its points");
            b.normals = *pl.normals;
            for (Vec2& n : b.normals) n = (1.0 / norm(n)) * n;
        } else {
            b.normals = approximate_normals(pl.points, shape.orientation);
        }
        check_inside_box(b, grid);
        // Supplied normals are taken as already oriented out of Omega.
        return b;
    }
    if (shape.orientation == Orientation::ExteriorIsOmega)
        for (Vec2& n : b.normals) n = {-n.x, -n.y};
    check_inside_box(b, grid);
    return b;
}

ImmersedBoundary concatenate(const std::vector<ImmersedBoundary>& parts) {
    ImmersedBoundary out;
    out.curve_starts.clear();
    for (const auto& p : parts) {
        for (std::size_t c = 0; c < p.curve_count(); ++c) out.curve_starts.push_back(out.points.size() + p.curve_starts[c]);
        out.points.insert(out.points.end(), p.points.begin(), p.points.end());
        out.weights.insert(out.weights.end(), p.weights.begin(), p.weights.end());
        out.normals.insert(out.normals.end(), p.normals.begin(), p.normals.end());
    }
    if (out.curve_starts.empty()) out.curve_starts.push_back(0);
    return out;
}

std::vector<Vec2> approximate_normals(const std::vector<Vec2>& p, Orientation orientation) {
    const std::size_t n = p.size();
    if (n < 3) throw GeometryError("normal approximation needs at least 3 points");
    // Orient so the formula yields normals out of the enclosed region even for
    // clockwise input.
    double sign = signed_area(p) >= 0.0 ? 1.0 : -1.0;
    if (orientation == Orientation::ExteriorIsOmega) sign = -sign;
    std::vector<Vec2> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 chord = p[(i + 1) % n] - p[(i + n - 1) % n];
        const double len = norm(chord);
        if (len == 0.0) throw GeometryError("coincident neighbouring boundary points");
        out[i] = {sign * chord.y / len, -sign * chord.x / len};
    }
    return out;
}

std::vector<double> arclength_weights(const std::vector<Vec2>& p) {
    const std::size_t n = p.size();
    std::vector<double> w(n, 0.0);
    if (n == 0) return w;
    for (std::size_t i = 0; i < n; ++i) {
        const double forward = norm(p[(i + 1) % n] - p[i]);
        const double backward = norm(p[i] - p[(i + n - 1) % n]);
        w[i] = 0.5 * (forward + backward);
        if (w[i] == 0.0) throw GeometryError("degenerate boundary point with zero arclength weight");
    }
    return w;
}

PointList read_point_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open point list " + path.string());
    PointList out;
    std::vector<Vec2> normals;
    std::string line;
    int line_no = 0;
    std::optional<bool> with_normals;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        std::vector<double> vals;
        double v;
        while (row >> v) vals.push_back(v);
        if (!row.eof() || (vals.size() != 2 && vals.size() != 4))
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 'x y' or 'x y nx ny'");
        const bool has = vals.size() == 4;
        if (with_normals && *with_normals != has)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": inconsistent column count");
        with_normals = has;
        out.points.push_back({vals[0], vals[1]});
        if (has) normals.push_back({vals[2], vals[3]});
    }
    if (with_normals.value_or(false)) out.normals = std::move(normals);
    return out;
}

}  // namespace ibdl
