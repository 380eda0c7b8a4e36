#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibdl::tools {

// Raised for malformed or inconsistent run configurations. `where` is either
// "line L, column C" (syntax) or a dotted field path (content).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

enum class ExperimentKind { ScalarRefine, FluidRefine, IterationTable, DragSweep, NsRun, IndicatorDemo };
std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

enum class Equation { Helmholtz, Poisson, Neumann, Brinkman, Stokes };
std::string to_string(Equation e);
Equation parse_equation(const std::string& s);
bool is_fluid(Equation e);

struct ShapeConfig {
    std::string type = "circle";  // circle | ellipse | starfish | points
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.25;          // circle
    double semi_a = 0.0, semi_b = 0.0, rotation = 0.0;  // ellipse
    double scale = 1.0;            // starfish
    std::string file;              // points: "x y [nx ny]" rows

    bool operator==(const ShapeConfig&) const = default;
};

struct ProblemConfig {
    Equation equation = Equation::Helmholtz;
    std::string solution = "bessel-helmholtz";  // analytic or flow solution name, or "none"
    double k2 = 0.0;
    double mu = 1.0;
    double wavenumber = 1.0;       // flow solutions with a wavenumber
    double solution_length = 0.25; // Bessel normalisation radius or the ExpPoisson period
    double box_length = 1.0;
    std::optional<std::array<double, 2>> box_origin;  // default centres the box on 0
    std::vector<ShapeConfig> shapes{ShapeConfig{}};
    std::string omega = "interior";  // interior | exterior
    std::string extension = "zero";  // zero | smooth | mean-balance
    std::array<double, 2> forcing{0.0, 0.0};  // constant body force when solution = "none"

    bool operator==(const ProblemConfig&) const = default;
};

struct InterpolationSection {
    std::string policy = "fixed";  // fixed | log-growth
    int m1 = 6;
    int m2 = 8;
    int growth = 2;

    bool operator==(const InterpolationSection&) const = default;
};

struct DiscretizationConfig {
    std::string scheme = "finite-difference";  // finite-difference | spectral
    std::string kernel = "peskin4";            // peskin4 | bspline6
    std::string stencil = "standard5";         // standard5 | wide
    InterpolationSection interpolation{};
    double tolerance = 1e-8;
    std::optional<int> max_iterations;

    bool operator==(const DiscretizationConfig&) const = default;
};

struct ErrorConfig {
    bool exclude_band = false;     // drop nodes flagged for near-boundary interpolation
    double pressure_offset = 0.0;  // pressure errors only this far from the boundary

    bool operator==(const ErrorConfig&) const = default;
};

struct DragConfig {
    std::vector<double> areas;  // circle areas c; empty means use the problem shapes as given

    bool operator==(const DragConfig&) const = default;
};

struct NsSection {
    double reynolds = 10.0;
    double rho = 1.0;
    double u_inf = 1.0;
    double dt = 1.8e-3;
    int strip_width = 4;
    std::optional<int> steps;
    std::optional<double> t_end;
    std::optional<double> reference_length;  // default: radius of the circular obstacle
    std::array<double, 2> average_window{54.0, 144.0};
    double transient = 0.0;  // lift peaks before this time are ignored
    std::array<double, 4> control_box{0.5, 3.203125, 2.8125, 5.1875};
    bool nonlinear = true;
    bool cache_operator = true;
    int snapshot_every = 0;
    int progress_every = 0;  // log a line to stderr every k steps

    bool operator==(const NsSection&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    bool snapshots = false;

    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    std::string name = "run";
    ExperimentKind experiment = ExperimentKind::ScalarRefine;
    ProblemConfig problem{};
    DiscretizationConfig discretization{};
    std::vector<int> grids{64};
    std::vector<double> alphas{1.0};
    std::vector<std::string> methods{"ibdl"};
    std::vector<double> etas{0.0};
    ErrorConfig errors{};
    DragConfig drag{};
    NsSection ns{};
    OutputConfig output{};

    bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError on inconsistent content.
void validate(const RunConfig& c);

// Strict parse: unknown keys and wrong types are errors; absent keys keep
// their defaults. The result is validated.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical text form (every field written, fixed key order).
std::string serialize(const RunConfig& c);

// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace ibdl::tools
