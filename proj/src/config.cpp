#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "annulus_critic/errors.hpp"
#include "annulus_critic/experiment.hpp"

namespace annulus_critic {

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k) out += sep;
        out += parts[k];
    }
    return out;
}

std::string child(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

const Json& require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError("config: '" + (path.empty() ? "<root>" : path) + "' must be an object");
    return j;
}

void reject_unknown(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ParseError("config: unknown key '" + child(path, item.key()) + "'");
    }
}

const Json& require_key(const Json& obj, const std::string& path, std::string_view key) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) throw ParseError("config: missing key '" + child(path, key) + "'");
    return *it;
}

double number_at(const Json& obj, const std::string& path, std::string_view key) {
    const Json& v = require_key(obj, path, key);
    if (!v.is_number()) throw ParseError("config: '" + child(path, key) + "' must be a number");
    return v.get<double>();
}

int integer_at(const Json& obj, const std::string& path, std::string_view key) {
    const Json& v = require_key(obj, path, key);
    if (!v.is_number_integer()) throw ParseError("config: '" + child(path, key) + "' must be an integer");
    const auto value = v.get<long long>();
    if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max())
        throw ParseError("config: '" + child(path, key) + "' is out of range");
    return static_cast<int>(value);
}

std::string string_at(const Json& obj, const std::string& path, std::string_view key) {
    const Json& v = require_key(obj, path, key);
    if (!v.is_string()) throw ParseError("config: '" + child(path, key) + "' must be a string");
    return v.get<std::string>();
}

// Line and column of a byte offset, both 1-based.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

DomainSpec parse_domain_at(const Json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"variant", "params"});
    const std::string variant = string_at(j, path, "variant");
    const std::string pp = child(path, "params");
    const Json& p = require_object(require_key(j, path, "params"), pp);
    if (variant == "ConcentricAnnulus") {
        reject_unknown(p, pp, {"r0", "R0"});
        return ConcentricAnnulus{number_at(p, pp, "r0"), number_at(p, pp, "R0")};
    }
    if (variant == "EccentricAnnulus") {
        reject_unknown(p, pp, {"a", "r", "R"});
        return EccentricAnnulus{number_at(p, pp, "a"), number_at(p, pp, "r"), number_at(p, pp, "R")};
    }
    if (variant == "PetalEllipse") {
        reject_unknown(p, pp, {"a_in", "b1", "b2"});
        return PetalEllipse{number_at(p, pp, "a_in"), number_at(p, pp, "b1"), number_at(p, pp, "b2")};
    }
    if (variant == "PetalPolygon") {
        reject_unknown(p, pp, {"a_in", "k", "rho"});
        return PetalPolygon{number_at(p, pp, "a_in"), integer_at(p, pp, "k"), number_at(p, pp, "rho")};
    }
    if (variant == "ScaledEllipseAnnulus") {
        reject_unknown(p, pp, {"b1", "b2", "s"});
        return ScaledEllipseAnnulus{number_at(p, pp, "b1"), number_at(p, pp, "b2"), number_at(p, pp, "s")};
    }
    throw ParseError("config: '" + child(path, "variant") + "' has unknown variant '" + variant + "'");
}

Nonlinearity parse_nonlinearity_at(const Json& j, const std::string& path) {
    require_object(j, path);
    const std::string kind = string_at(j, path, "kind");
    if (kind == "Constant") {
        reject_unknown(j, path, {"kind", "c"});
        return Nonlinearity::constant(number_at(j, path, "c"));
    }
    if (kind == "AffineDecreasing") {
        reject_unknown(j, path, {"kind", "c0", "c1"});
        return Nonlinearity::affine_decreasing(number_at(j, path, "c0"), number_at(j, path, "c1"));
    }
    if (kind == "ExpDecreasing") {
        reject_unknown(j, path, {"kind", "c0", "c1"});
        return Nonlinearity::exp_decreasing(number_at(j, path, "c0"), number_at(j, path, "c1"));
    }
    throw ParseError("config: '" + child(path, "kind") + "' has unknown nonlinearity '" + kind + "'");
}

}  // namespace

std::string_view to_string(Check c) {
    switch (c) {
        case Check::Counts: return "counts";
        case Check::Exclusion: return "exclusion";
        case Check::Morse: return "morse";
        case Check::Nodal: return "nodal";
        case Check::PlaneSweep: return "plane-sweep";
        case Check::SphereSweep: return "sphere-sweep";
    }
    return "counts";
}

std::optional<Check> check_from_string(std::string_view name) {
    for (Check c : all_checks())
        if (to_string(c) == name) return c;
    return std::nullopt;
}

const std::vector<Check>& all_checks() {
    static const std::vector<Check> checks{Check::Counts, Check::Exclusion,  Check::Morse,
                                           Check::Nodal,  Check::PlaneSweep, Check::SphereSweep};
    return checks;
}

std::string_view to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Skipped: return "skipped";
    }
    return "skipped";
}

DomainSpec parse_domain(const Json& j) { return parse_domain_at(j, "domain"); }

Nonlinearity parse_nonlinearity(const Json& j) { return parse_nonlinearity_at(j, "nonlinearity"); }

std::vector<std::string> validate_config(const ExperimentConfig& config) {
    std::vector<std::string> v = validate(config.domain);
    if (config.n < 32) v.push_back("n >= 32 violated (n=" + std::to_string(config.n) + ")");
    const auto positive = [&](double x, const char* what) {
        if (!(x > 0.0) || !std::isfinite(x)) v.push_back(std::string(what) + " must be a positive finite number");
    };
    positive(config.tolerances.solver, "tolerances.solver");
    positive(config.tolerances.gradient_rel, "tolerances.gradient_rel");
    positive(config.tolerances.axis_h, "tolerances.axis_h");
    if (config.tolerances.axis_h < 1.0) v.push_back("tolerances.axis_h >= 1 violated (axis tolerance below h)");
    if (config.sweep_steps < 2) v.push_back("sweep_steps >= 2 violated");
    std::set<Check> seen;
    for (Check c : config.checks)
        if (!seen.insert(c).second) v.push_back("check '" + std::string(to_string(c)) + "' listed twice");
    return v;
}

ExperimentConfig parse_config_text(std::string_view text) {
    Json root;
    try {
        root = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = locate(text, e.byte);
        throw ParseError("config: syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": " + e.what());
    }
    require_object(root, "");
    reject_unknown(root, "", {"name", "domain", "nonlinearity", "n", "tolerances", "checks", "sweep_steps", "output_dir"});

    ExperimentConfig c;
    c.domain = parse_domain_at(require_key(root, "", "domain"), "domain");
    if (root.contains("nonlinearity")) c.nonlinearity = parse_nonlinearity_at(root.at("nonlinearity"), "nonlinearity");
    if (root.contains("name")) c.name = string_at(root, "", "name");
    if (root.contains("n")) c.n = integer_at(root, "", "n");
    if (root.contains("sweep_steps")) c.sweep_steps = integer_at(root, "", "sweep_steps");
    if (root.contains("output_dir")) c.output_dir = string_at(root, "", "output_dir");
    if (root.contains("tolerances")) {
        const Json& t = require_object(root.at("tolerances"), "tolerances");
        reject_unknown(t, "tolerances", {"solver", "gradient_rel", "axis_h"});
        if (t.contains("solver")) c.tolerances.solver = number_at(t, "tolerances", "solver");
        if (t.contains("gradient_rel")) c.tolerances.gradient_rel = number_at(t, "tolerances", "gradient_rel");
        if (t.contains("axis_h")) c.tolerances.axis_h = number_at(t, "tolerances", "axis_h");
    }
    if (root.contains("checks")) {
        const Json& arr = root.at("checks");
        if (!arr.is_array()) throw ParseError("config: 'checks' must be an array of check names");
        c.checks.clear();
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string where = "checks[" + std::to_string(k) + "]";
            if (!arr[k].is_string()) throw ParseError("config: '" + where + "' must be a string");
            const auto check = check_from_string(arr[k].get<std::string>());
            if (!check) throw ParseError("config: '" + where + "' names unknown check '" + arr[k].get<std::string>() + "'");
            c.checks.push_back(*check);
        }
    }
    const auto violations = validate_config(c);
    if (!violations.empty()) throw ValidationError("config: " + join(violations, "; "));
    return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("config: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

ExperimentConfig preset(std::string_view name) {
    ExperimentConfig c;
    c.n = 192;
    c.nonlinearity = Nonlinearity::constant(1.0);
    if (name == "example1") {
        c.name = "example1";
        c.domain = PetalEllipse{1.0, 6.0, 4.0};
    } else if (name == "example2") {
        c.name = "example2";
        c.domain = EccentricAnnulus{0.3, 0.2, 0.8};
    } else {
        throw ValidationError("unknown run preset '" + std::string(name) + "' (expected example1 or example2)");
    }
    return c;
}

InstabilityConfig instability_preset() { return InstabilityConfig{}; }

std::vector<std::string> validate_instability(const InstabilityConfig& c) {
    std::vector<std::string> v = validate(ConcentricAnnulus{c.r0, c.R0});
    if (c.n < 32) v.push_back("n >= 32 violated (n=" + std::to_string(c.n) + ")");
    if (!(c.gradient_rel > 0.0)) v.push_back("gradient_rel > 0 violated");
    if (c.offsets.empty()) v.push_back("offsets must not be empty");
    for (double a : c.offsets) {
        if (!std::isfinite(a) || a < 0.0)
            v.push_back("offset a=" + std::to_string(a) + " must be finite and >= 0");
        else if (!(a + c.r0 < c.R0))
            v.push_back("a+r<R violated for a=" + std::to_string(a));
    }
    return v;
}

// ---------------------------------------------------------------- serialization

Json domain_json(const DomainSpec& spec) {
    Json params = Json::object();
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConcentricAnnulus>) {
                params["r0"] = s.r0;
                params["R0"] = s.R0;
            } else if constexpr (std::is_same_v<T, EccentricAnnulus>) {
                params["a"] = s.a;
                params["r"] = s.r;
                params["R"] = s.R;
            } else if constexpr (std::is_same_v<T, PetalEllipse>) {
                params["a_in"] = s.a_in;
                params["b1"] = s.b1;
                params["b2"] = s.b2;
            } else if constexpr (std::is_same_v<T, PetalPolygon>) {
                params["a_in"] = s.a_in;
                params["k"] = s.k;
                params["rho"] = s.rho;
            } else {
                params["b1"] = s.b1;
                params["b2"] = s.b2;
                params["s"] = s.s;
            }
        },
        spec.shape());
    Json j;
    j["variant"] = spec.variant_name();
    j["params"] = params;
    return j;
}

Json nonlinearity_json(const Nonlinearity& f) {
    Json j;
    j["kind"] = f.kind_name();
    if (f.kind() == Nonlinearity::Kind::Constant) {
        j["c"] = f.c0();
    } else {
        j["c0"] = f.c0();
        j["c1"] = f.c1();
    }
    return j;
}

Json grid_json(const Grid& g) {
    Json j;
    j["n"] = g.n();
    j["nx"] = g.nx();
    j["ny"] = g.ny();
    j["h"] = g.h();
    j["bbox"] = {g.bbox().xlo, g.bbox().xhi, g.bbox().ylo, g.bbox().yhi};
    j["interior_count"] = g.interior_count();
    j["hash"] = std::to_string(g.fingerprint());
    return j;
}

Json critical_points_json(const std::vector<CriticalPoint>& points) {
    Json arr = Json::array();
    for (const auto& p : points) {
        Json j;
        j["x"] = p.location.x;
        j["y"] = p.location.y;
        j["kind"] = to_string(p.kind);
        j["grad_norm"] = p.grad_norm;
        j["hess_eigs"] = {p.hessian_eigs[0], p.hessian_eigs[1]};
        j["axis"] = p.axis ? Json(*p.axis) : Json(nullptr);
        arr.push_back(std::move(j));
    }
    return arr;
}

Json sweep_json(const std::vector<ReflectionReport>& reports) {
    Json arr = Json::array();
    for (const auto& r : reports) {
        Json j;
        j["lambda"] = r.lambda;
        j["region"] = r.region;
        j["min_diff"] = r.n_pairs ? Json(r.min_diff) : Json(nullptr);
        j["max_diff"] = r.n_pairs ? Json(r.max_diff) : Json(nullptr);
        j["violations"] = r.violations;
        j["n_pairs"] = r.n_pairs;
        j["normal_derivative_consistent"] = r.normal_derivative_consistent;
        j["images_outside"] = r.images_outside;
        j["limit_exceeded"] = r.limit_exceeded;
        j["flagged"] = r.flagged;
        arr.push_back(std::move(j));
    }
    return arr;
}

Json instability_json(const InstabilityReport& report) {
    Json entries = Json::array();
    for (const auto& e : report.entries) {
        Json j;
        j["a"] = e.a;
        j["h"] = e.h;
        if (e.ring) {
            j["ring"] = {{"center", {e.ring->center.x, e.ring->center.y}},
                         {"radius", e.ring->radius},
                         {"radius_spread", e.ring->radius_spread},
                         {"samples", e.ring->samples}};
        } else {
            j["ring"] = nullptr;
        }
        j["isolated_points"] = e.isolated_points;
        j["max_cluster_diameter"] = e.max_cluster_diameter;
        j["max_cluster_diameter_h"] = e.h > 0.0 ? e.max_cluster_diameter / e.h : 0.0;
        j["points"] = critical_points_json(e.points);
        entries.push_back(std::move(j));
    }
    Json j;
    j["schema"] = 1;
    j["kind"] = "instability";
    j["entries"] = entries;
    j["consistent"] = report.consistent;
    return j;
}

Json to_json(const VerdictReport& r, std::string_view timestamp) {
    Json j;
    j["schema"] = 1;
    j["generated_at"] = timestamp;
    j["config"] = r.config_echo;
    j["grid"] = {{"hash", std::to_string(r.grid_hash)}, {"h", r.h}, {"interior_count", r.interior_count}};
    j["solver"] = {{"residual", r.residual}, {"newton_steps", r.newton_steps}, {"max_u", r.max_u}};
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json cj;
        cj["check"] = to_string(c.check);
        cj["status"] = to_string(c.status);
        cj["measured"] = c.measured;
        checks.push_back(std::move(cj));
    }
    j["checks"] = checks;
    j["passed"] = r.all_passed();
    return j;
}

std::string field_csv(const ScalarField& field) {
    const Grid& g = field.grid();
    std::string out = "x,y,u\n";
    char buf[96];
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        const Vec2 p = g.node(k);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x, p.y, field[k]);
        out += buf;
    }
    return out;
}

std::string curves_csv(const std::vector<std::vector<Vec2>>& curves) {
    std::string out = "curve_id,x,y\n";
    char buf[96];
    for (std::size_t c = 0; c < curves.size(); ++c) {
        for (const Vec2& p : curves[c]) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", c, p.x, p.y);
            out += buf;
        }
    }
    return out;
}

std::string level_sets_csv(const std::vector<LevelSet>& levels) {
    std::string out = "level,curve_id,x,y\n";
    char buf[128];
    std::size_t id = 0;
    for (const auto& ls : levels) {
        for (const auto& pl : ls.curves) {
            for (const Vec2& p : pl.points) {
                std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g\n", ls.level, id, p.x, p.y);
                out += buf;
            }
            if (pl.closed && !pl.points.empty()) {
                std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g\n", ls.level, id, pl.points.front().x,
                              pl.points.front().y);
                out += buf;
            }
            ++id;
        }
    }
    return out;
}

}  // namespace annulus_critic
