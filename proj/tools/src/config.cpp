#include "ibdl_tools/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ibdl/reference.hpp"

namespace ibdl::tools {

using Json = nlohmann::ordered_json;

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::ScalarRefine: return "scalar-refine";
        case ExperimentKind::FluidRefine: return "fluid-refine";
        case ExperimentKind::IterationTable: return "iteration-table";
        case ExperimentKind::DragSweep: return "drag-sweep";
        case ExperimentKind::NsRun: return "ns-run";
        case ExperimentKind::IndicatorDemo: return "indicator-demo";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
    for (auto k : {ExperimentKind::ScalarRefine, ExperimentKind::FluidRefine, ExperimentKind::IterationTable,
                   ExperimentKind::DragSweep, ExperimentKind::NsRun, ExperimentKind::IndicatorDemo})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown experiment '" + s + "'");
}

std::string to_string(Equation e) {
    switch (e) {
        case Equation::Helmholtz: return "helmholtz";
        case Equation::Poisson: return "poisson";
        case Equation::Neumann: return "neumann";
        case Equation::Brinkman: return "brinkman";
        case Equation::Stokes: return "stokes";
    }
    return "?";
}

Equation parse_equation(const std::string& s) {
    for (auto e : {Equation::Helmholtz, Equation::Poisson, Equation::Neumann, Equation::Brinkman, Equation::Stokes})
        if (to_string(e) == s) return e;
    throw std::invalid_argument("unknown equation '" + s + "'");
}

bool is_fluid(Equation e) { return e == Equation::Brinkman || e == Equation::Stokes; }

namespace {

// Every reader is declared up front so the templates below can find each other.
void read(const Json& v, const std::string& path, double& out);
void read(const Json& v, const std::string& path, int& out);
void read(const Json& v, const std::string& path, bool& out);
void read(const Json& v, const std::string& path, std::string& out);
template <class T>
void read(const Json& v, const std::string& path, std::vector<T>& out);
template <std::size_t N>
void read(const Json& v, const std::string& path, std::array<double, N>& out);
template <class T>
void read(const Json& v, const std::string& path, std::optional<T>& out);
void read(const Json& v, const std::string& path, ExperimentKind& out);
void read(const Json& v, const std::string& path, Equation& out);
void read(const Json& v, const std::string& path, ShapeConfig& s);
void read(const Json& v, const std::string& path, ProblemConfig& p);
void read(const Json& v, const std::string& path, InterpolationSection& s);
void read(const Json& v, const std::string& path, DiscretizationConfig& d);
void read(const Json& v, const std::string& path, ErrorConfig& e);
void read(const Json& v, const std::string& path, DragConfig& d);
void read(const Json& v, const std::string& path, NsSection& n);
void read(const Json& v, const std::string& path, OutputConfig& o);

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown fields.
class Reader {
public:
    Reader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "config" : path_, "expected an object");
    }

    template <class T>
    void field(const char* key, T& out) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) return;
        read(*it, child(key), out);
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(child(it.key()), "unknown field");
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const Json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

void read(const Json& v, const std::string& path, double& out) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(path, "expected a finite number");
}

void read(const Json& v, const std::string& path, int& out) {
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(path, "integer out of range");
    out = static_cast<int>(x);
}

void read(const Json& v, const std::string& path, bool& out) {
    if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
    out = v.get<bool>();
}

void read(const Json& v, const std::string& path, std::string& out) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    out = v.get<std::string>();
}

template <class T>
void read(const Json& v, const std::string& path, std::vector<T>& out) {
    if (!v.is_array()) throw ConfigError(path, "expected a list");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
        T item{};
        read(v[i], path + "[" + std::to_string(i) + "]", item);
        out.push_back(std::move(item));
    }
}

template <std::size_t N>
void read(const Json& v, const std::string& path, std::array<double, N>& out) {
    if (!v.is_array() || v.size() != N) throw ConfigError(path, "expected a list of " + std::to_string(N) + " numbers");
    for (std::size_t i = 0; i < N; ++i) read(v[i], path + "[" + std::to_string(i) + "]", out[i]);
}

template <class T>
void read(const Json& v, const std::string& path, std::optional<T>& out) {
    if (v.is_null()) {
        out.reset();
        return;
    }
    T x{};
    read(v, path, x);
    out = std::move(x);
}

void read(const Json& v, const std::string& path, ExperimentKind& out) {
    std::string s;
    read(v, path, s);
    try {
        out = parse_experiment_kind(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

void read(const Json& v, const std::string& path, Equation& out) {
    std::string s;
    read(v, path, s);
    try {
        out = parse_equation(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

void read(const Json& v, const std::string& path, ShapeConfig& s) {
    Reader r(v, path);
    r.field("type", s.type);
    r.field("center", s.center);
    r.field("radius", s.radius);
    r.field("semi_a", s.semi_a);
    r.field("semi_b", s.semi_b);
    r.field("rotation", s.rotation);
    r.field("scale", s.scale);
    r.field("file", s.file);
    r.finish();
}

void read(const Json& v, const std::string& path, ProblemConfig& p) {
    Reader r(v, path);
    r.field("equation", p.equation);
    r.field("solution", p.solution);
    r.field("k2", p.k2);
    r.field("mu", p.mu);
    r.field("wavenumber", p.wavenumber);
    r.field("solution_length", p.solution_length);
    r.field("box_length", p.box_length);
    r.field("box_origin", p.box_origin);
    r.field("shapes", p.shapes);
    r.field("omega", p.omega);
    r.field("extension", p.extension);
    r.field("forcing", p.forcing);
    r.finish();
}

void read(const Json& v, const std::string& path, InterpolationSection& s) {
    Reader r(v, path);
    r.field("policy", s.policy);
    r.field("m1", s.m1);
    r.field("m2", s.m2);
    r.field("growth", s.growth);
    r.finish();
}

void read(const Json& v, const std::string& path, DiscretizationConfig& d) {
    Reader r(v, path);
    r.field("scheme", d.scheme);
    r.field("kernel", d.kernel);
    r.field("stencil", d.stencil);
    r.field("interpolation", d.interpolation);
    r.field("tolerance", d.tolerance);
    r.field("max_iterations", d.max_iterations);
    r.finish();
}

void read(const Json& v, const std::string& path, ErrorConfig& e) {
    Reader r(v, path);
    r.field("exclude_band", e.exclude_band);
    r.field("pressure_offset", e.pressure_offset);
    r.finish();
}

void read(const Json& v, const std::string& path, DragConfig& d) {
    Reader r(v, path);
    r.field("areas", d.areas);
    r.finish();
}

void read(const Json& v, const std::string& path, NsSection& n) {
    Reader r(v, path);
    r.field("reynolds", n.reynolds);
    r.field("rho", n.rho);
    r.field("u_inf", n.u_inf);
    r.field("dt", n.dt);
    r.field("strip_width", n.strip_width);
    r.field("steps", n.steps);
    r.field("t_end", n.t_end);
    r.field("reference_length", n.reference_length);
    r.field("average_window", n.average_window);
    r.field("transient", n.transient);
    r.field("control_box", n.control_box);
    r.field("nonlinear", n.nonlinear);
    r.field("cache_operator", n.cache_operator);
    r.field("snapshot_every", n.snapshot_every);
    r.field("progress_every", n.progress_every);
    r.finish();
}

void read(const Json& v, const std::string& path, OutputConfig& o) {
    Reader r(v, path);
    r.field("directory", o.directory);
    r.field("snapshots", o.snapshots);
    r.finish();
}

void read(const Json& v, const std::string& path, RunConfig& c) {
    Reader r(v, path);
    r.field("name", c.name);
    r.field("experiment", c.experiment);
    r.field("problem", c.problem);
    r.field("discretization", c.discretization);
    r.field("grids", c.grids);
    r.field("alphas", c.alphas);
    r.field("methods", c.methods);
    r.field("etas", c.etas);
    r.field("errors", c.errors);
    r.field("drag", c.drag);
    r.field("ns", c.ns);
    r.field("output", c.output);
    r.finish();
}

template <class T>
Json opt(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json to_json(const ShapeConfig& s) {
    return Json{{"type", s.type},     {"center", s.center}, {"radius", s.radius}, {"semi_a", s.semi_a},
                {"semi_b", s.semi_b}, {"rotation", s.rotation}, {"scale", s.scale}, {"file", s.file}};
}

Json to_json(const RunConfig& c) {
    Json shapes = Json::array();
    for (const auto& s : c.problem.shapes) shapes.push_back(to_json(s));
    const auto& p = c.problem;
    const auto& d = c.discretization;
    const auto& n = c.ns;
    return Json{
        {"name", c.name},
        {"experiment", to_string(c.experiment)},
        {"problem",
         {{"equation", to_string(p.equation)},
          {"solution", p.solution},
          {"k2", p.k2},
          {"mu", p.mu},
          {"wavenumber", p.wavenumber},
          {"solution_length", p.solution_length},
          {"box_length", p.box_length},
          {"box_origin", opt(p.box_origin)},
          {"shapes", shapes},
          {"omega", p.omega},
          {"extension", p.extension},
          {"forcing", p.forcing}}},
        {"discretization",
         {{"scheme", d.scheme},
          {"kernel", d.kernel},
          {"stencil", d.stencil},
          {"interpolation",
           {{"policy", d.interpolation.policy},
            {"m1", d.interpolation.m1},
            {"m2", d.interpolation.m2},
            {"growth", d.interpolation.growth}}},
          {"tolerance", d.tolerance},
          {"max_iterations", opt(d.max_iterations)}}},
        {"grids", c.grids},
        {"alphas", c.alphas},
        {"methods", c.methods},
        {"etas", c.etas},
        {"errors", {{"exclude_band", c.errors.exclude_band}, {"pressure_offset", c.errors.pressure_offset}}},
        {"drag", {{"areas", c.drag.areas}}},
        {"ns",
         {{"reynolds", n.reynolds},
          {"rho", n.rho},
          {"u_inf", n.u_inf},
          {"dt", n.dt},
          {"strip_width", n.strip_width},
          {"steps", opt(n.steps)},
          {"t_end", opt(n.t_end)},
          {"reference_length", opt(n.reference_length)},
          {"average_window", n.average_window},
          {"transient", n.transient},
          {"control_box", n.control_box},
          {"nonlinear", n.nonlinear},
          {"cache_operator", n.cache_operator},
          {"snapshot_every", n.snapshot_every},
          {"progress_every", n.progress_every}}},
        {"output", {{"directory", c.output.directory}, {"snapshots", c.output.snapshots}}},
    };
}

void require(bool ok, const std::string& where, const std::string& what) {
    if (!ok) throw ConfigError(where, what);
}

bool one_of(const std::string& s, std::initializer_list<const char*> options) {
    for (const char* o : options)
        if (s == o) return true;
    return false;
}

void validate_shape(const ShapeConfig& s, const std::string& path) {
    require(one_of(s.type, {"circle", "ellipse", "starfish", "points"}), path + ".type",
            "expected circle, ellipse, starfish or points");
    if (s.type == "circle") require(s.radius > 0.0, path + ".radius", "must be positive");
    if (s.type == "ellipse") {
        require(s.semi_a > 0.0, path + ".semi_a", "must be positive");
        require(s.semi_b > 0.0, path + ".semi_b", "must be positive");
    }
    if (s.type == "starfish") require(s.scale > 0.0, path + ".scale", "must be positive");
    if (s.type == "points") require(!s.file.empty(), path + ".file", "a point file is required");
}

}  // namespace

void validate(const RunConfig& c) {
    require(!c.name.empty(), "name", "must not be empty");
    for (char ch : c.name)
        require(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.', "name",
                "only letters, digits, '-', '_' and '.' are allowed");

    require(!c.grids.empty(), "grids", "grid list is empty");
    for (std::size_t i = 0; i < c.grids.size(); ++i) {
        const int n = c.grids[i];
        const std::string where = "grids[" + std::to_string(i) + "]";
        require(n >= 8 && (n & (n - 1)) == 0, where, "grid sizes must be powers of two of at least 8");
        if (i > 0) require(n > c.grids[i - 1], where, "grid list must be strictly increasing");
    }
    require(!c.alphas.empty(), "alphas", "spacing ratio list is empty");
    for (std::size_t i = 0; i < c.alphas.size(); ++i)
        require(c.alphas[i] > 0.0, "alphas[" + std::to_string(i) + "]", "must be positive");
    require(!c.methods.empty(), "methods", "method list is empty");
    for (std::size_t i = 0; i < c.methods.size(); ++i)
        require(one_of(c.methods[i], {"ibdl", "ibsl"}), "methods[" + std::to_string(i) + "]",
                "expected ibdl or ibsl");
    require(!c.etas.empty(), "etas", "eta list is empty");
    for (std::size_t i = 0; i < c.etas.size(); ++i)
        require(c.etas[i] >= 0.0, "etas[" + std::to_string(i) + "]", "must be non-negative");

    const auto& p = c.problem;
    require(p.box_length > 0.0, "problem.box_length", "must be positive");
    require(p.mu > 0.0, "problem.mu", "must be positive");
    require(p.k2 >= 0.0, "problem.k2", "must be non-negative");
    require(one_of(p.omega, {"interior", "exterior"}), "problem.omega", "expected interior or exterior");
    require(one_of(p.extension, {"zero", "smooth", "mean-balance"}), "problem.extension",
            "expected zero, smooth or mean-balance");
    require(!p.shapes.empty(), "problem.shapes", "at least one shape is required");
    for (std::size_t i = 0; i < p.shapes.size(); ++i)
        validate_shape(p.shapes[i], "problem.shapes[" + std::to_string(i) + "]");
    switch (p.equation) {
        case Equation::Helmholtz:
        case Equation::Brinkman: require(p.k2 > 0.0, "problem.k2", "must be positive for this equation"); break;
        case Equation::Poisson:
        case Equation::Stokes: require(p.k2 == 0.0, "problem.k2", "must be zero for this equation"); break;
        case Equation::Neumann: break;
    }
    if (is_fluid(p.equation)) {
        if (p.solution != "none") {
            try {
                (void)parse_flow_kind(p.solution);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("problem.solution", std::string(e.what()) + " (or none)");
            }
        }
        if (p.solution == "stokes-exp")
            require(p.equation == Equation::Stokes, "problem.solution", "stokes-exp solves the Stokes equation");
    } else {
        AnalyticKind kind{};
        try {
            kind = parse_analytic_kind(p.solution);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("problem.solution", e.what());
        }
        if (kind == AnalyticKind::BesselHelmholtz)
            require(p.equation == Equation::Helmholtz && p.k2 == 1.0, "problem.solution",
                    "bessel-helmholtz needs the helmholtz equation with k2 = 1");
        if (kind == AnalyticKind::PoissonTrig || kind == AnalyticKind::ExpPoisson)
            require(p.equation == Equation::Poisson, "problem.solution", p.solution + " solves the Poisson equation");
    }

    const auto& d = c.discretization;
    require(one_of(d.scheme, {"finite-difference", "spectral"}), "discretization.scheme",
            "expected finite-difference or spectral");
    require(one_of(d.kernel, {"peskin4", "bspline6"}), "discretization.kernel", "expected peskin4 or bspline6");
    require(one_of(d.stencil, {"standard5", "wide"}), "discretization.stencil", "expected standard5 or wide");
    require(one_of(d.interpolation.policy, {"fixed", "log-growth"}), "discretization.interpolation.policy",
            "expected fixed or log-growth");
    if (d.interpolation.policy == "fixed")
        require(d.interpolation.m2 > d.interpolation.m1 && d.interpolation.m1 >= 0, "discretization.interpolation",
                "needs m2 > m1 >= 0");
    require(d.interpolation.growth >= 1, "discretization.interpolation.growth", "must be at least 1");
    require(d.tolerance > 0.0 && d.tolerance < 1.0, "discretization.tolerance", "must lie in (0, 1)");
    if (d.max_iterations) require(*d.max_iterations > 0, "discretization.max_iterations", "must be positive");

    require(c.errors.pressure_offset >= 0.0, "errors.pressure_offset", "must be non-negative");
    for (std::size_t i = 0; i < c.drag.areas.size(); ++i)
        require(c.drag.areas[i] > 0.0 && c.drag.areas[i] < p.box_length * p.box_length,
                "drag.areas[" + std::to_string(i) + "]", "must be positive and smaller than the box");

    switch (c.experiment) {
        case ExperimentKind::ScalarRefine:
            require(!is_fluid(p.equation), "problem.equation", "scalar-refine needs a scalar equation");
            break;
        case ExperimentKind::FluidRefine:
            require(is_fluid(p.equation), "problem.equation", "fluid-refine needs brinkman or stokes");
            require(p.solution != "none", "problem.solution", "fluid-refine needs an exact solution");
            break;
        case ExperimentKind::DragSweep:
            require(is_fluid(p.equation), "problem.equation", "drag-sweep needs brinkman or stokes");
            require(p.omega == "exterior", "problem.omega", "drag-sweep needs an exterior domain");
            break;
        case ExperimentKind::NsRun: {
            const auto& n = c.ns;
            require(c.grids.size() == 1, "grids", "ns-run takes exactly one grid");
            require(c.methods.size() == 1, "methods", "ns-run takes exactly one method");
            require(c.etas.size() == 1, "etas", "ns-run takes exactly one eta");
            require(c.alphas.size() == 1, "alphas", "ns-run takes exactly one spacing ratio");
            require(n.reynolds > 0.0, "ns.reynolds", "must be positive");
            require(n.rho > 0.0, "ns.rho", "must be positive");
            require(n.u_inf > 0.0, "ns.u_inf", "must be positive");
            require(n.dt > 0.0, "ns.dt", "must be positive");
            require(n.strip_width >= 0, "ns.strip_width", "must be non-negative");
            require(n.steps.has_value() != n.t_end.has_value(), "ns", "give exactly one of steps and t_end");
            if (n.steps) require(*n.steps > 0, "ns.steps", "must be positive");
            if (n.t_end) require(*n.t_end > 0.0, "ns.t_end", "must be positive");
            require(n.average_window[0] < n.average_window[1], "ns.average_window", "start must precede end");
            require(n.snapshot_every >= 0, "ns.snapshot_every", "must be non-negative");
            require(n.progress_every >= 0, "ns.progress_every", "must be non-negative");
            require(n.control_box[0] < n.control_box[1] && n.control_box[2] < n.control_box[3], "ns.control_box",
                    "expected [x0, x1, y0, y1] with x0 < x1 and y0 < y1");
            if (!n.reference_length)
                require(p.shapes.size() == 1 && p.shapes[0].type == "circle", "ns.reference_length",
                        "required unless the obstacle is a single circle");
            else
                require(*n.reference_length > 0.0, "ns.reference_length", "must be positive");
            break;
        }
        case ExperimentKind::IterationTable:
        case ExperimentKind::IndicatorDemo: break;
    }
    if (p.equation == Equation::Neumann) {
        for (const auto& m : c.methods) require(m == "ibdl", "methods", "the Neumann solver is double layer only");
        require(p.extension == "zero", "problem.extension", "the Neumann solver uses the zero extension");
    }
}

RunConfig parse_config(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        // Translate the byte offset into a line and column.
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
        throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), msg);
    }
    RunConfig c;
    read(doc, "", c);
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : serialize(c)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ibdl::tools
