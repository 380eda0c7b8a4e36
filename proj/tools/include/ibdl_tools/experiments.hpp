#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ibdl/boundary.hpp"
#include "ibdl/grid.hpp"
#include "ibdl_tools/config.hpp"
#include "ibdl_tools/output.hpp"

namespace ibdl::tools {

struct RunOptions {
    int threads = 1;                  // rows of a sweep run concurrently when > 1
    std::filesystem::path output_dir; // snapshots are written here during the run; empty disables them
    std::ostream* log = nullptr;      // one progress line per row
};

struct ExperimentResult {
    std::vector<Table> tables;
    int failures = 0;  // rows whose solve failed or did not converge
    double wall_seconds = 0.0;

    const Table& table(const std::string& name) const;  // throws std::out_of_range
};

ExperimentResult run_experiment(const RunConfig& c, const RunOptions& options = {});

// Metadata lines for one table: name, experiment, config hash, wall time, UTC timestamp.
Metadata metadata_for(const RunConfig& c, const ExperimentResult& r, const Table& t);

// Writes <dir>/<table>.csv and <dir>/<table>.schema.json for every table plus
// <dir>/config.json. Returns the CSV paths.
std::vector<std::filesystem::path> write_result(const RunConfig& c, const ExperimentResult& r,
                                                const std::filesystem::path& dir);

// Building blocks shared with the tests.
PeriodicGrid make_grid(const RunConfig& c, int n);
// All configured shapes with the configured orientation at spacing alpha * h.
ImmersedBoundary make_boundary(const RunConfig& c, const PeriodicGrid& g, double alpha);

// log2(e_coarse / e_fine) / log2(n_fine / n_coarse); NaN when either error is
// not a positive finite number.
double observed_order(double e_coarse, double e_fine, int n_coarse, int n_fine);

}  // namespace ibdl::tools
