#include <catch_amalgamated.hpp>

#include <set>

#include "ibdl_tools/builtins.hpp"
#include "ibdl_tools/config.hpp"

using namespace ibdl::tools;
using Catch::Matchers::ContainsSubstring;

namespace {

// Returns the ConfigError location for text that must fail to parse.
std::string error_where(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.where();
    }
    FAIL("config was accepted: " << text);
    return {};
}

}  // namespace

TEST_CASE("builtin configurations", "[config]") {
    const auto all = builtin_benchmarks();
    CHECK(all.size() >= 11);
    std::set<std::string> names;
    for (const auto& c : all) {
        names.insert(c.name);
        CHECK_NOTHROW(validate(c));
        // Serialise, parse and compare field by field.
        const RunConfig back = parse_config(serialize(c));
        CHECK(back == c);
        CHECK(serialize(back) == serialize(c));
        CHECK(config_hash(back) == config_hash(c));
    }
    for (const char* expected : {"bessel-helmholtz", "starfish-poisson", "exterior-poisson-completion",
                                 "neumann-circle", "brinkman-manufactured", "eta-sweep", "fd-method2",
                                 "cylinder-drag", "nine-ellipses", "ns-re10", "ns-re100"})
        CHECK(names.count(expected) == 1);
    CHECK(names.size() == all.size());
    CHECK(find_builtin("ns-re10").has_value());
    CHECK_FALSE(find_builtin("no-such-run").has_value());
}

TEST_CASE("absent keys keep their defaults", "[config]") {
    const RunConfig c = parse_config(R"({"name": "tiny", "grids": [16, 32], "problem": {"k2": 1}})");
    CHECK(c.name == "tiny");
    CHECK(c.grids == std::vector<int>{16, 32});
    CHECK(c.problem.solution == RunConfig{}.problem.solution);
    CHECK(c.discretization == RunConfig{}.discretization);
    CHECK(config_hash(c).size() == 16);
    CHECK(config_hash(c) != config_hash(RunConfig{}));
}

TEST_CASE("syntax errors carry line and column", "[config]") {
    CHECK(error_where("{\n  \"name\": \"x\",\n  \"grids\": [16,, 32]\n}") == "line 3, column 16");
    CHECK_THAT(error_where("{"), ContainsSubstring("line 1"));
}

TEST_CASE("content errors carry the field path", "[config]") {
    CHECK(error_where(R"({"grids": []})") == "grids");
    CHECK_THROWS_WITH(parse_config(R"({"grids": []})"), ContainsSubstring("grid list is empty"));
    CHECK(error_where(R"({"grids": [64, 32]})") == "grids[1]");
    CHECK(error_where(R"({"grids": [48]})") == "grids[0]");
    CHECK(error_where(R"({"grid": [64]})") == "grid");
    CHECK(error_where(R"({"problem": {"shapes": [{"type": "circle", "radious": 1}]}})") == "problem.shapes[0].radious");
    CHECK(error_where(R"({"problem": {"k2": "one"}})") == "problem.k2");
    CHECK(error_where(R"({"discretization": {"interpolation": {"m1": 1.5}}})") == "discretization.interpolation.m1");
    CHECK(error_where(R"({"methods": ["ibdx"]})") == "methods[0]");
    CHECK(error_where(R"({"problem": {"equation": "poisson", "k2": 2, "solution": "poisson-trig"}})") == "problem.k2");
    CHECK(error_where(R"({"problem": {"equation": "poisson"}})") == "problem.solution");
    CHECK(error_where(R"({"experiment": "fluid-refine", "problem": {"k2": 1}})") == "problem.equation");
    CHECK(error_where(R"({"experiment": "warp-drive"})") == "experiment");
    CHECK(error_where(R"({"problem": {"equation": "neumann", "solution": "quadratic", "k2": 1}, "methods": ["ibsl"]})") ==
          "methods");
    CHECK(error_where(R"({"problem": {"equation": "neumann", "solution": "quadratic", "k2": 1, "extension": "smooth"}, "methods": ["ibdl"]})") ==
          "problem.extension");
    CHECK(error_where(R"({"experiment": "ns-run", "problem": {"equation": "brinkman", "solution": "none", "k2": 1}})") == "ns");
    CHECK(error_where(R"({"experiment": "ns-run", "grids": [64, 128], "problem": {"equation": "brinkman", "solution": "none", "k2": 1}, "ns": {"steps": 3}})") ==
          "grids");
    CHECK(error_where("[1, 2]") == "config");
}

TEST_CASE("enumeration names round trip", "[config]") {
    for (auto k : {ExperimentKind::ScalarRefine, ExperimentKind::FluidRefine, ExperimentKind::IterationTable,
                   ExperimentKind::DragSweep, ExperimentKind::NsRun, ExperimentKind::IndicatorDemo})
        CHECK(parse_experiment_kind(to_string(k)) == k);
    for (auto e : {Equation::Helmholtz, Equation::Poisson, Equation::Neumann, Equation::Brinkman, Equation::Stokes})
        CHECK(parse_equation(to_string(e)) == e);
    CHECK(is_fluid(Equation::Stokes));
    CHECK_FALSE(is_fluid(Equation::Neumann));
}

TEST_CASE("missing config file", "[config]") {
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}
