#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>

#include "annulus_critic/errors.hpp"
#include "annulus_critic/experiment.hpp"

namespace annulus_critic {

namespace fs = std::filesystem;

namespace {

constexpr int kNodalDirections = 8;
constexpr int kContourLevels = 9;
constexpr double kNodalEndGapH = 2.0;
constexpr double kSaddleProbeH = 6.0;
constexpr double kClusterLimitH = 4.0;
constexpr double kRingRadiusTolRel = 5e-3;  // relative to the annulus width

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

Vec2 direction(int k) {
    const double t = std::numbers::pi * k / kNodalDirections;
    return {std::cos(t), std::sin(t)};
}

Json point_json(Vec2 p) { return Json::array({p.x, p.y}); }

bool has_isolated_theory(const DomainSpec& spec) { return !spec.is<ConcentricAnnulus>(); }

bool has_exclusion_theory(const DomainSpec& spec) { return spec.is<EccentricAnnulus>() || spec.is<PetalEllipse>(); }

/// Runs `body`, rewrapping any failure as a StageError naming `stage` and
/// dropping the "failed" marker next to the partial artifacts.
template <class F>
auto in_stage(const char* stage, const fs::path& out, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const std::exception& e) {
        if (!out.empty()) {
            std::error_code ec;
            fs::create_directories(out, ec);
            std::ofstream marker(out / "failed", std::ios::trunc);
            marker << "stage: " << stage << "\n" << e.what() << "\n";
        }
        std::throw_with_nested(StageError(stage, e.what()));
    }
}

struct PlaneSpec {
    std::string label;
    Vec2 normal;
    LambdaRange range;
};

// Predicted intervals of the moving-plane sweeps, T_λ: x·normal = λ.
std::vector<PlaneSpec> plane_sweeps_for(const DomainSpec& spec) {
    std::vector<PlaneSpec> out;
    if (spec.is<EccentricAnnulus>()) {
        const auto& d = spec.as<EccentricAnnulus>();
        out.push_back({"+x", {1.0, 0.0}, {(d.a + d.r + d.R) / 2.0, d.R, true, false}});
        out.push_back({"-x", {-1.0, 0.0}, {(d.R - d.a + d.r) / 2.0, d.R, true, false}});
    } else if (spec.is<PetalEllipse>()) {
        const auto& d = spec.as<PetalEllipse>();
        out.push_back({"+x", {1.0, 0.0}, {(d.a_in + d.b1) / 2.0, d.b1, true, false}});
        out.push_back({"-x", {-1.0, 0.0}, {(d.a_in + d.b1) / 2.0, d.b1, true, false}});
        out.push_back({"+y", {0.0, 1.0}, {(d.a_in + d.b2) / 2.0, d.b2, true, false}});
        out.push_back({"-y", {0.0, -1.0}, {(d.a_in + d.b2) / 2.0, d.b2, true, false}});
    }
    return out;
}

Json sweep_summary(const SweepResult& s) {
    int violations = 0, pairs = 0, empty = 0;
    bool normal_ok = true;
    for (const auto& r : s.reports) {
        violations += r.violations;
        pairs += r.n_pairs;
        if (r.n_pairs == 0 && !r.limit_exceeded) ++empty;
        normal_ok = normal_ok && r.normal_derivative_consistent;
    }
    Json j;
    j["violations"] = violations;
    j["pairs"] = pairs;
    j["empty_samples"] = empty;
    j["normal_derivative_consistent"] = normal_ok;
    j["limit_exceeded"] = s.limit_exceeded;
    j["first_violation"] = s.first_violation ? Json(*s.first_violation) : Json(nullptr);
    return j;
}

CheckResult check_counts(const ExperimentConfig& cfg, const Grid& g, const CriticalSet& cs) {
    CheckResult r{Check::Counts};
    const DomainSpec& spec = cfg.domain;
    const double tau_d = cfg.tolerances.axis_h * g.h();
    const auto axes = symmetry_axes(spec);
    r.measured["total"] = cs.points.size();
    r.measured["ring"] = static_cast<bool>(cs.ring);

    if (spec.is<ConcentricAnnulus>()) {
        const auto& d = spec.as<ConcentricAnnulus>();
        bool ok = cs.ring.has_value() && cs.points.empty();
        if (cs.ring) {
            r.measured["ring_radius"] = cs.ring->radius;
            r.measured["ring_radius_spread"] = cs.ring->radius_spread;
        }
        if (cfg.nonlinearity.kind() == Nonlinearity::Kind::Constant || cfg.nonlinearity.derivative_is_zero()) {
            const double expected = radial_critical_radius(d.r0, d.R0);
            r.measured["ring_radius_expected"] = expected;
            if (cs.ring) ok = ok && std::abs(cs.ring->radius - expected) <= kRingRadiusTolRel * (d.R0 - d.r0);
        }
        r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
        return r;
    }

    const auto counts = count_by_axis(cs.points, axes.axes, tau_d);
    Json per_axis = Json::object();
    for (const auto& c : counts.per_axis) per_axis[c.axis] = c.count;
    r.measured["per_axis"] = per_axis;
    r.measured["off_axis"] = counts.off_axis;
    r.measured["tau_d"] = tau_d;

    // Each symmetry axis carries exactly two critical points and nothing lies off-axis.
    bool ok = !cs.ring && counts.off_axis == 0;
    for (const auto& c : counts.per_axis) ok = ok && c.count == 2;
    std::size_t expected_total = 2 * axes.axes.size();
    ok = ok && cs.points.size() == expected_total;
    r.measured["expected_total"] = expected_total;

    if (spec.is<EccentricAnnulus>()) {
        // Maximum on the long side x < a - r, saddle on the short side x > a + r.
        const auto& d = spec.as<EccentricAnnulus>();
        int left_max = 0, right_saddle = 0;
        for (const auto& p : cs.points) {
            if (p.kind == CriticalKind::Maximum && p.location.x > -d.R && p.location.x < d.a - d.r) ++left_max;
            if (p.kind == CriticalKind::Saddle && p.location.x > d.a + d.r && p.location.x < d.R) ++right_saddle;
        }
        r.measured["maxima_long_side"] = left_max;
        r.measured["saddles_short_side"] = right_saddle;
        ok = ok && left_max == 1 && right_saddle == 1;
    } else if (spec.is<PetalEllipse>()) {
        // Maxima on the long axis, saddles on the short one.
        int on_long_max = 0, on_short_saddle = 0;
        for (const auto& p : cs.points) {
            if (!p.axis) continue;
            const auto it = std::find_if(axes.axes.begin(), axes.axes.end(),
                                         [&](const SymmetryAxis& a) { return a.name == *p.axis; });
            if (it == axes.axes.end()) continue;
            if (it->classification == AxisClass::Long && p.kind == CriticalKind::Maximum) ++on_long_max;
            if (it->classification == AxisClass::Short && p.kind == CriticalKind::Saddle) ++on_short_saddle;
        }
        r.measured["maxima_on_long_axis"] = on_long_max;
        r.measured["saddles_on_short_axis"] = on_short_saddle;
        const auto& d = spec.as<PetalEllipse>();
        if (d.b1 != d.b2) ok = ok && on_long_max == 2 && on_short_saddle == 2;
    }
    r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    return r;
}

CheckResult check_exclusion(const ExperimentConfig& cfg, const Grid& g, const CriticalSet& cs) {
    CheckResult r{Check::Exclusion};
    if (!has_exclusion_theory(cfg.domain)) {
        r.measured["reason"] = "no exclusion region for this variant";
        return r;
    }
    const auto region = exclusion_region(cfg.domain);
    r.measured["box"] = {region.allowed_box.xlo, region.allowed_box.xhi, region.allowed_box.ylo,
                         region.allowed_box.yhi};
    r.measured["annulus"] = {{"center", point_json(region.annulus_center)}, {"r_lo", region.r_lo}, {"r_hi", region.r_hi}};
    Json margins = Json::array();
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& p : cs.points) {
        const double m = region.margin(p.location);
        min_margin = std::min(min_margin, m);
        margins.push_back(m);
    }
    r.measured["margins"] = margins;
    const bool any = !cs.points.empty();
    r.measured["min_margin"] = any ? Json(min_margin) : Json(nullptr);
    r.measured["min_margin_h"] = any ? Json(min_margin / g.h()) : Json(nullptr);
    r.status = any && min_margin > 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
    return r;
}

CheckResult check_morse(const ExperimentConfig& cfg, const ScalarField& u, const CriticalSet& cs) {
    CheckResult r{Check::Morse};
    if (!has_isolated_theory(cfg.domain)) {
        r.measured["reason"] = "critical set is a circle";
        return r;
    }
    const auto mb = morse_balance(cs.points);
    r.measured["n_max"] = mb.n_max;
    r.measured["n_saddle"] = mb.n_saddle;
    r.measured["n_degenerate"] = mb.n_degenerate;
    r.measured["balanced"] = mb.balanced;
    const double radius = kSaddleProbeH * u.grid().h();
    Json branches = Json::array();
    bool ok = mb.balanced && !cs.points.empty();
    for (const auto& p : cs.points) {
        if (p.kind != CriticalKind::Saddle) continue;
        int count = 0;
        try {
            count = level_branch_count(u, p.location, radius);
        } catch (const OutsideDomain&) {
            count = -1;
        }
        branches.push_back(count);
        ok = ok && count >= 4;
    }
    r.measured["saddle_level_branches"] = branches;
    r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    return r;
}

CheckResult check_nodal(const ExperimentConfig& cfg, const Grid& g, const std::vector<std::vector<NodalCurve>>& sets) {
    CheckResult r{Check::Nodal};
    if (!has_isolated_theory(cfg.domain)) {
        r.measured["reason"] = "critical set is a circle";
        return r;
    }
    const Vec2 c = inner_center(cfg.domain);
    bool ok = true;
    double worst_gap = 0.0;
    int open = 0, closed = 0, closed_not_enclosing = 0;
    Json per_dir = Json::array();
    for (std::size_t k = 0; k < sets.size(); ++k) {
        int dir_open = 0, dir_closed = 0;
        for (const auto& curve : sets[k]) {
            if (curve.closed()) {
                ++dir_closed;
                if (winding_number(curve.polyline, c) == 0) ++closed_not_enclosing;
            } else {
                ++dir_open;
                worst_gap = std::max({worst_gap, curve.endpoint_gaps[0], curve.endpoint_gaps[1]});
            }
        }
        open += dir_open;
        closed += dir_closed;
        per_dir.push_back({{"k", k}, {"open", dir_open}, {"closed", dir_closed}});
    }
    r.measured["directions"] = per_dir;
    r.measured["open_curves"] = open;
    r.measured["closed_curves"] = closed;
    r.measured["closed_not_enclosing_inner"] = closed_not_enclosing;
    r.measured["max_endpoint_gap"] = worst_gap;
    r.measured["max_endpoint_gap_h"] = worst_gap / g.h();
    ok = worst_gap <= kNodalEndGapH * g.h() && closed_not_enclosing == 0;
    if (cfg.domain.is<EccentricAnnulus>() && !sets.empty()) {
        // N_(1,0) never crosses the line through the inner center perpendicular to the axis.
        const double x0 = cfg.domain.as<EccentricAnnulus>().a;
        bool crossing = false;
        for (const auto& curve : sets[0]) crossing = crossing || crosses_vertical(cfg.domain, curve.polyline, x0, 0.0);
        r.measured["crosses_inner_center_line"] = crossing;
        ok = ok && !crossing;
    }
    r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    return r;
}

CheckResult check_sweeps(Check which, const Json& summaries, bool applicable, bool require_no_limit) {
    CheckResult r{which};
    if (!applicable) {
        r.measured["reason"] = "no sweep interval for this variant";
        return r;
    }
    bool ok = !summaries.empty();
    int violations = 0;
    for (const auto& s : summaries) {
        violations += s.at("summary").at("violations").get<int>();
        ok = ok && s.at("summary").at("violations").get<int>() == 0 && s.at("summary").at("pairs").get<int>() > 0;
        if (require_no_limit) ok = ok && !s.at("summary").at("limit_exceeded").get<bool>();
    }
    r.measured["total_violations"] = violations;
    r.measured["sweeps"] = summaries;
    r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    return r;
}

bool enabled(const ExperimentConfig& cfg, Check c) {
    return std::find(cfg.checks.begin(), cfg.checks.end(), c) != cfg.checks.end();
}

}  // namespace

double radial_critical_radius(double r0, double R0) {
    return std::sqrt((R0 * R0 - r0 * r0) / (2.0 * std::log(R0 / r0)));
}

bool VerdictReport::all_passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

const CheckResult* VerdictReport::find(Check c) const {
    for (const auto& r : checks)
        if (r.check == c) return &r;
    return nullptr;
}

RunOutcome run(const ExperimentConfig& cfg) {
    const fs::path& out = cfg.output_dir;
    in_stage("config", out, [&] {
        const auto v = validate_config(cfg);
        if (!v.empty()) {
            std::string msg = "invalid experiment config:";
            for (const auto& s : v) msg += " " + s + ";";
            throw ValidationError(msg);
        }
        if (!out.empty()) {
            fs::create_directories(out);
            fs::remove(out / "failed");
        }
        return 0;
    });

    RunOutcome res;
    VerdictReport& rep = res.report;
    rep.config_echo["name"] = cfg.name;
    rep.config_echo["domain"] = domain_json(cfg.domain);
    rep.config_echo["nonlinearity"] = nonlinearity_json(cfg.nonlinearity);
    rep.config_echo["n"] = cfg.n;
    rep.config_echo["tolerances"] = {{"solver", cfg.tolerances.solver},
                                     {"gradient_rel", cfg.tolerances.gradient_rel},
                                     {"axis_h", cfg.tolerances.axis_h}};
    Json checks = Json::array();
    for (Check c : cfg.checks) checks.push_back(to_string(c));
    rep.config_echo["checks"] = checks;
    rep.config_echo["sweep_steps"] = cfg.sweep_steps;

    const auto grid = in_stage("grid", out, [&] { return build_grid(cfg.domain, cfg.n); });
    rep.grid_hash = grid->fingerprint();
    rep.h = grid->h();
    rep.interior_count = grid->interior_count();
    if (!out.empty()) in_stage("export", out, [&] { write_json(out / "grid.json", grid_json(*grid)); return 0; });

    res.solution = in_stage("solve", out, [&] {
        SolveOptions so;
        so.tol = cfg.tolerances.solver;
        return solve(grid, cfg.nonlinearity, so);
    });
    const ScalarField& u = res.solution->field;
    rep.residual = res.solution->residual;
    rep.newton_steps = res.solution->newton_steps;
    rep.max_u = u.max_value();
    if (!out.empty()) in_stage("export", out, [&] { write_file(out / "field.csv", field_csv(u)); return 0; });

    res.critical = in_stage("critical", out, [&] {
        DetectionOptions dopt;
        dopt.grad_tol_rel = cfg.tolerances.gradient_rel;
        dopt.axis_tol_h = cfg.tolerances.axis_h;
        return find_critical_points(u, dopt);
    });
    if (!out.empty())
        in_stage("export", out, [&] {
            write_json(out / "critical_points.json", critical_points_json(res.critical.points));
            std::vector<double> levels;
            for (int k = 1; k <= kContourLevels; ++k) levels.push_back(u.max_value() * k / (kContourLevels + 1));
            write_file(out / "contours.csv", level_sets_csv(level_sets(u, levels)));
            return 0;
        });

    std::vector<std::vector<NodalCurve>> nodal(kNodalDirections);
    in_stage("nodal", out, [&] {
        for (int k = 0; k < kNodalDirections; ++k) {
            nodal[static_cast<std::size_t>(k)] = nodal_set(u, direction(k));
            if (!out.empty()) {
                std::vector<std::vector<Vec2>> curves;
                for (const auto& c : nodal[static_cast<std::size_t>(k)]) {
                    curves.push_back(c.polyline);
                    if (c.closed() && !c.polyline.empty()) curves.back().push_back(c.polyline.front());
                }
                write_file(out / ("nodal_" + std::to_string(k) + ".csv"), curves_csv(curves));
            }
        }
        return 0;
    });

    Json sweep_file = Json::object();
    sweep_file["schema"] = 1;
    sweep_file["sweeps"] = Json::array();
    Json plane_summaries = Json::array(), sphere_summaries = Json::array();
    const bool planes_apply = has_exclusion_theory(cfg.domain);
    if (enabled(cfg, Check::PlaneSweep) && planes_apply) {
        in_stage("plane-sweep", out, [&] {
            for (const auto& ps : plane_sweeps_for(cfg.domain)) {
                res.plane_sweeps.push_back(sweep_plane(u, ps.normal, ps.range, cfg.sweep_steps));
                const auto& s = res.plane_sweeps.back();
                Json entry;
                entry["kind"] = "plane";
                entry["direction"] = ps.label;
                entry["normal"] = point_json(ps.normal);
                entry["range"] = {ps.range.lo, ps.range.hi};
                entry["range_closed"] = {ps.range.include_lo, ps.range.include_hi};
                entry["summary"] = sweep_summary(s);
                plane_summaries.push_back(entry);
                entry["reports"] = sweep_json(s.reports);
                sweep_file["sweeps"].push_back(std::move(entry));
            }
            return 0;
        });
    }
    if (enabled(cfg, Check::SphereSweep) && planes_apply) {
        in_stage("sphere-sweep", out, [&] {
            const auto region = exclusion_region(cfg.domain);
            const LambdaRange range{region.r_lo, region.r_hi, false, true};
            res.sphere_sweeps.push_back(sweep_sphere(u, range, cfg.sweep_steps));
            const auto& s = res.sphere_sweeps.back();
            Json entry;
            entry["kind"] = "sphere";
            entry["center"] = point_json(inner_center(cfg.domain));
            entry["range"] = {range.lo, range.hi};
            entry["range_closed"] = {range.include_lo, range.include_hi};
            entry["summary"] = sweep_summary(s);
            sphere_summaries.push_back(entry);
            entry["reports"] = sweep_json(s.reports);
            sweep_file["sweeps"].push_back(std::move(entry));
            return 0;
        });
    }
    if (!out.empty()) in_stage("export", out, [&] { write_json(out / "sweep.json", sweep_file); return 0; });

    for (Check c : cfg.checks) {
        CheckResult r = in_stage(to_string(c).data(), out, [&] {
            switch (c) {
                case Check::Counts: return check_counts(cfg, *grid, res.critical);
                case Check::Exclusion: return check_exclusion(cfg, *grid, res.critical);
                case Check::Morse: return check_morse(cfg, u, res.critical);
                case Check::Nodal: return check_nodal(cfg, *grid, nodal);
                case Check::PlaneSweep: return check_sweeps(c, plane_summaries, planes_apply, false);
                case Check::SphereSweep: return check_sweeps(c, sphere_summaries, planes_apply, true);
            }
            return CheckResult{c};
        });
        rep.checks.push_back(std::move(r));
    }
    if (!out.empty()) in_stage("export", out, [&] { write_json(out / "report.json", to_json(rep, utc_timestamp())); return 0; });
    return res;
}

InstabilityReport instability_sweep(const InstabilityConfig& cfg) {
    const auto v = validate_instability(cfg);
    if (!v.empty()) {
        std::string msg = "invalid instability sweep:";
        for (const auto& s : v) msg += " " + s + ";";
        throw ValidationError(msg);
    }
    InstabilityReport rep;
    bool consistent = true;
    for (double a : cfg.offsets) {
        const DomainSpec spec = a == 0.0 ? DomainSpec(ConcentricAnnulus{cfg.r0, cfg.R0})
                                         : DomainSpec(EccentricAnnulus{a, cfg.r0, cfg.R0});
        const auto grid = build_grid(spec, cfg.n);
        const auto sol = solve(grid, cfg.nonlinearity);
        DetectionOptions dopt;
        dopt.grad_tol_rel = cfg.gradient_rel;
        const auto cs = find_critical_points(sol.field, dopt);
        InstabilityEntry e;
        e.a = a;
        e.h = grid->h();
        e.ring = cs.ring;
        e.isolated_points = static_cast<int>(cs.points.size());
        e.max_cluster_diameter = cs.max_cluster_diameter();
        e.points = cs.points;
        if (a == 0.0)
            consistent = consistent && e.ring.has_value() && e.isolated_points == 0;
        else
            consistent = consistent && !e.ring && e.isolated_points == 2 &&
                         e.max_cluster_diameter <= kClusterLimitH * e.h;
        rep.entries.push_back(std::move(e));
    }
    rep.consistent = consistent;
    if (!cfg.output_dir.empty()) {
        fs::create_directories(cfg.output_dir);
        write_json(cfg.output_dir / "sweep.json", instability_json(rep));
    }
    return rep;
}

}  // namespace annulus_critic
