#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ibdl_tools/config.hpp"

namespace ibdl::tools {

// The shipped experiment configurations, in a fixed order.
std::vector<RunConfig> builtin_benchmarks();

std::optional<RunConfig> find_builtin(const std::string& name);

}  // namespace ibdl::tools
