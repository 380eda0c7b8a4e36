#pragma once

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "ibdl/grid.hpp"

namespace testing {

inline ibdl::ScalarField random_field(const ibdl::PeriodicGrid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ibdl::ScalarField f(g);
    for (auto& v : f.values) v = d(rng);
    return f;
}

inline std::vector<double> random_vector(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

inline double max_diff(const ibdl::ScalarField& a, const ibdl::ScalarField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double grid_inner(const ibdl::ScalarField& a, const ibdl::ScalarField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s += a.values[k] * b.values[k];
    return s * a.grid.h() * a.grid.h();
}

}  // namespace testing
