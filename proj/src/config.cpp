#include "niche/config.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "niche/error.hpp"

namespace niche {

using nlohmann::json;

namespace {

const std::map<std::string, Subcommand> kSubcommands = {
    {"simulate", Subcommand::Simulate}, {"solve", Subcommand::Solve},
    {"compare", Subcommand::Compare},   {"validate", Subcommand::Validate},
    {"constants", Subcommand::Constants}, {"phantom", Subcommand::Phantom}};

std::set<std::string> allowed_keys(Subcommand c) {
    std::set<std::string> keys = {"subcommand", "domain", "s", "p", "h", "seed", "output_dir", "workers"};
    auto add = [&](std::initializer_list<const char*> more) { keys.insert(more.begin(), more.end()); };
    switch (c) {
        case Subcommand::Simulate: add({"N", "T", "snapshots", "initial", "grid"}); break;
        case Subcommand::Solve: add({"T", "snapshots", "initial", "grid", "alpha_override", "beta_override"}); break;
        case Subcommand::Phantom: add({"T", "snapshots", "initial", "grid"}); break;
        case Subcommand::Compare:
            add({"N", "T", "initial", "grid", "histogram_csv", "field_csv", "compare_tolerance"});
            break;
        case Subcommand::Validate: add({"T", "initial", "grid", "c_star_samples"}); break;
        case Subcommand::Constants: add({"c_star_samples"}); break;
    }
    return keys;
}

bool uses_lattice(Subcommand c) {
    return c == Subcommand::Solve || c == Subcommand::Phantom || c == Subcommand::Compare ||
           c == Subcommand::Validate;
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError("key '" + key + "': " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) throw ConfigError("unknown key '" + where + "." + it.key() + "'");
    }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing required key '" + path + "'");
    return *it;
}

double as_double(const json& v, const std::string& key) {
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "expected a finite number");
    return x;
}

std::int64_t as_int(const json& v, const std::string& key) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return static_cast<std::int64_t>(x);
    }
    fail(key, "expected an integer");
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

Point as_point(const json& v, const std::string& key, int dim) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
        fail(key, "expected an array of " + std::to_string(dim) + " numbers");
    Point p(dim);
    for (int k = 0; k < dim; ++k) p[k] = as_double(v[k], key);
    return p;
}

json point_json(const Point& p) {
    json a = json::array();
    for (int k = 0; k < p.dim(); ++k) a.push_back(p[k]);
    return a;
}

Domain parse_domain(const json& v) {
    if (!v.is_object()) fail("domain", "expected an object");
    const std::string shape = as_string(require(v, "shape", "domain.shape"), "domain.shape");
    if (shape == "interval") {
        check_keys(v, "domain", {"shape", "a", "b"});
        const double a = as_double(require(v, "a", "domain.a"), "domain.a");
        const double b = as_double(require(v, "b", "domain.b"), "domain.b");
        if (!(b > a)) fail("domain", "interval needs a < b");
        return Domain::interval(a, b);
    }
    if (shape == "rectangle") {
        check_keys(v, "domain", {"shape", "lo", "hi"});
        const Point lo = as_point(require(v, "lo", "domain.lo"), "domain.lo", 2);
        const Point hi = as_point(require(v, "hi", "domain.hi"), "domain.hi", 2);
        if (!(hi[0] > lo[0] && hi[1] > lo[1])) fail("domain", "rectangle needs lo < hi");
        return Domain::rectangle(lo, hi);
    }
    if (shape == "disk") {
        check_keys(v, "domain", {"shape", "center", "radius"});
        const Point c = as_point(require(v, "center", "domain.center"), "domain.center", 2);
        const double r = as_double(require(v, "radius", "domain.radius"), "domain.radius");
        if (!(r > 0.0)) fail("domain.radius", "must be positive");
        return Domain::disk(c, r);
    }
    fail("domain.shape", "unknown shape '" + shape + "' (interval, rectangle, disk)");
}

json domain_json(const Domain& d) {
    json j;
    if (const auto* I = std::get_if<Interval>(&d.shape())) {
        j["shape"] = "interval";
        j["a"] = I->a;
        j["b"] = I->b;
    } else if (const auto* R = std::get_if<Rectangle>(&d.shape())) {
        j["shape"] = "rectangle";
        j["lo"] = point_json(R->lo);
        j["hi"] = point_json(R->hi);
    } else if (const auto* D = std::get_if<Disk>(&d.shape())) {
        j["shape"] = "disk";
        j["center"] = point_json(D->center);
        j["radius"] = D->radius;
    } else {
        throw ConfigError("half-spaces cannot be configured");
    }
    return j;
}

GridSpec default_grid(const Domain& d) {
    Point lo, hi;
    d.bounding_box(lo, hi);
    if (d.dim() == 1) return {(hi[0] - lo[0]) / 256.0, 5.0};
    return {(hi[0] - lo[0]) / 32.0, 1.0};
}

}  // namespace

std::string to_string(Subcommand c) {
    for (const auto& [name, value] : kSubcommands)
        if (value == c) return name;
    return "unknown";
}

Subcommand parse_subcommand(const std::string& name) {
    auto it = kSubcommands.find(name);
    if (it == kSubcommands.end())
        throw ConfigError("key 'subcommand': unknown subcommand '" + name + "'");
    return it->second;
}

InitialCondition InitialSpec::to_condition() const {
    return kind == Kind::Uniform ? InitialCondition::uniform() : InitialCondition::point_mass(x0);
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");

    RunConfig c;
    c.subcommand = parse_subcommand(as_string(require(j, "subcommand", "subcommand"), "subcommand"));
    const auto allowed = allowed_keys(c.subcommand);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (allowed.count(it.key())) continue;
        bool elsewhere = false;
        for (const auto& [name, value] : kSubcommands) elsewhere = elsewhere || allowed_keys(value).count(it.key());
        throw ConfigError("unknown key '" + it.key() + "'" +
                          (elsewhere ? " for subcommand '" + to_string(c.subcommand) + "'" : ""));
    }

    c.domain = parse_domain(require(j, "domain", "domain"));
    const int n = c.domain.dim();
    c.params = ProcessParams(as_double(require(j, "s", "s"), "s"), as_double(require(j, "p", "p"), "p"),
                             as_double(require(j, "h", "h"), "h"));

    if (j.contains("seed")) {
        const auto seed = as_int(j["seed"], "seed");
        if (seed < 0) fail("seed", "must be non-negative");
        c.seed = static_cast<std::uint64_t>(seed);
    }
    if (j.contains("output_dir")) c.output_dir = as_string(j["output_dir"], "output_dir");
    if (c.output_dir.empty()) fail("output_dir", "must not be empty");
    if (j.contains("workers")) {
        const auto w = as_int(j["workers"], "workers");
        if (w < 0 || w > 4096) fail("workers", "must lie in [0, 4096]");
        c.workers = static_cast<int>(w);
    }
    if (j.contains("N")) c.particles = as_int(j["N"], "N");
    if (c.particles < 1) fail("N", "must be positive");
    if (j.contains("T")) c.final_time = as_double(j["T"], "T");
    if (c.final_time < 0.0) fail("T", "must be non-negative");
    if (j.contains("snapshots")) {
        const json& s = j["snapshots"];
        if (!s.is_array()) fail("snapshots", "expected an array of times");
        for (const auto& t : s) {
            const double v = as_double(t, "snapshots");
            if (v < 0.0 || v > c.final_time) fail("snapshots", "times must lie in [0, T]");
            c.snapshots.push_back(v);
        }
    }

    c.initial.x0 = c.domain.center();
    if (j.contains("initial")) {
        const json& v = j["initial"];
        if (!v.is_object()) fail("initial", "expected an object");
        check_keys(v, "initial", {"kind", "x0"});
        const std::string kind = as_string(require(v, "kind", "initial.kind"), "initial.kind");
        if (kind == "point_mass") {
            c.initial.kind = InitialSpec::Kind::PointMass;
            if (v.contains("x0")) c.initial.x0 = as_point(v["x0"], "initial.x0", n);
        } else if (kind == "uniform") {
            c.initial.kind = InitialSpec::Kind::Uniform;
            if (v.contains("x0")) fail("initial.x0", "only valid for point_mass");
        } else {
            fail("initial.kind", "unknown kind '" + kind + "' (point_mass, uniform)");
        }
    }
    if (c.initial.kind == InitialSpec::Kind::PointMass && !c.domain.contains(c.initial.x0))
        fail("initial.x0", "must lie inside the domain");

    c.grid = default_grid(c.domain);
    if (j.contains("grid")) {
        const json& v = j["grid"];
        if (!v.is_object()) fail("grid", "expected an object");
        check_keys(v, "grid", {"dx", "band_width"});
        if (v.contains("dx")) c.grid.dx = as_double(v["dx"], "grid.dx");
        if (v.contains("band_width")) c.grid.band_width = as_double(v["band_width"], "grid.band_width");
    }
    if (!(c.grid.dx > 0.0)) fail("grid.dx", "must be positive");
    if (c.grid.band_width < 0.0) fail("grid.band_width", "must be non-negative");
    try {
        HistogramGrid::over_domain(c.domain, c.grid.dx);
    } catch (const ConfigError& e) {
        fail("grid.dx", e.what());
    }
    if (uses_lattice(c.subcommand) && std::holds_alternative<Disk>(c.domain.shape()))
        fail("domain", "subcommand '" + to_string(c.subcommand) + "' needs an interval or rectangle");

    if (j.contains("alpha_override")) {
        c.alpha_override = as_double(j["alpha_override"], "alpha_override");
        if (*c.alpha_override < 0.0) fail("alpha_override", "must be non-negative");
    }
    if (j.contains("beta_override")) {
        c.beta_override = as_double(j["beta_override"], "beta_override");
        if (*c.beta_override < 0.0) fail("beta_override", "must be non-negative");
    }
    if (j.contains("histogram_csv")) c.histogram_csv = as_string(j["histogram_csv"], "histogram_csv");
    if (j.contains("field_csv")) c.field_csv = as_string(j["field_csv"], "field_csv");
    if (c.histogram_csv.empty() != c.field_csv.empty())
        throw ConfigError("keys 'histogram_csv' and 'field_csv' must be given together");
    if (j.contains("c_star_samples")) c.c_star_samples = as_int(j["c_star_samples"], "c_star_samples");
    if (c.c_star_samples < 2) fail("c_star_samples", "must be at least 2");
    if (j.contains("compare_tolerance")) c.compare_tolerance = as_double(j["compare_tolerance"], "compare_tolerance");
    if (c.compare_tolerance < 0.0) fail("compare_tolerance", "must be non-negative");
    return c;
}

std::string serialize_config(const RunConfig& c) {
    const auto allowed = allowed_keys(c.subcommand);
    json j;
    j["subcommand"] = to_string(c.subcommand);
    j["domain"] = domain_json(c.domain);
    j["s"] = c.params.s();
    j["p"] = c.params.p();
    j["h"] = c.params.h();
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["workers"] = c.workers;
    if (allowed.count("N")) j["N"] = c.particles;
    if (allowed.count("T")) j["T"] = c.final_time;
    if (allowed.count("snapshots")) j["snapshots"] = c.snapshots;
    if (allowed.count("initial")) {
        json init;
        if (c.initial.kind == InitialSpec::Kind::Uniform) {
            init["kind"] = "uniform";
        } else {
            init["kind"] = "point_mass";
            init["x0"] = point_json(c.initial.x0);
        }
        j["initial"] = init;
    }
    if (allowed.count("grid")) j["grid"] = {{"dx", c.grid.dx}, {"band_width", c.grid.band_width}};
    if (allowed.count("alpha_override") && c.alpha_override) j["alpha_override"] = *c.alpha_override;
    if (allowed.count("beta_override") && c.beta_override) j["beta_override"] = *c.beta_override;
    if (allowed.count("histogram_csv") && !c.histogram_csv.empty()) {
        j["histogram_csv"] = c.histogram_csv;
        j["field_csv"] = c.field_csv;
    }
    if (allowed.count("compare_tolerance")) j["compare_tolerance"] = c.compare_tolerance;
    if (allowed.count("c_star_samples")) j["c_star_samples"] = c.c_star_samples;
    return j.dump(2) + "\n";
}

}  // namespace niche
