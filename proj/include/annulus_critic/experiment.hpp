#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "annulus_critic/contour.hpp"
#include "annulus_critic/critical.hpp"
#include "annulus_critic/errors.hpp"
#include "annulus_critic/reflection.hpp"
#include "annulus_critic/solver.hpp"

namespace annulus_critic {

using Json = nlohmann::ordered_json;

enum class Check { Counts, Exclusion, Morse, Nodal, PlaneSweep, SphereSweep };

std::string_view to_string(Check c);
std::optional<Check> check_from_string(std::string_view name);
const std::vector<Check>& all_checks();

struct Tolerances {
    double solver = 1e-10;
    double gradient_rel = 1e-8;  // τ_g = gradient_rel · max|∇u|
    double axis_h = 3.0;         // τ_d = axis_h · h
};

struct ExperimentConfig {
    std::string name = "custom";
    DomainSpec domain;
    Nonlinearity nonlinearity = Nonlinearity::constant(1.0);
    int n = 192;
    Tolerances tolerances;
    std::vector<Check> checks = all_checks();
    int sweep_steps = 20;
    std::filesystem::path output_dir;
};

/// Empty iff the config satisfies every precondition.
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// Strict JSON config parsing. Throws ParseError (syntax, unknown or mistyped
/// keys, with line or key context) and ValidationError (violated invariants).
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Compiled-in presets: "example1" and "example2". Throws ValidationError otherwise.
ExperimentConfig preset(std::string_view name);

enum class CheckStatus { Pass, Fail, Skipped };
std::string_view to_string(CheckStatus s);

struct CheckResult {
    Check check;
    CheckStatus status = CheckStatus::Skipped;
    Json measured = Json::object();
};

struct VerdictReport {
    Json config_echo;
    std::uint64_t grid_hash = 0;
    double h = 0.0;
    std::size_t interior_count = 0;
    double residual = 0.0;
    int newton_steps = 0;
    double max_u = 0.0;
    std::vector<CheckResult> checks;

    bool all_passed() const;
    const CheckResult* find(Check c) const;
};

/// Everything produced by one pipeline run.
struct RunOutcome {
    VerdictReport report;
    std::optional<SolveResult> solution;
    CriticalSet critical;
    std::vector<SweepResult> plane_sweeps;
    std::vector<SweepResult> sphere_sweeps;
};

/// Solve, detect and verify; writes artifacts when output_dir is set. Module
/// errors propagate as StageError naming the failed stage (the original
/// exception is nested); a "failed" marker file is left in output_dir.
RunOutcome run(const ExperimentConfig& config);

class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what) : Error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Concentric base (a = 0) plus eccentric offsets of the inner circle.
struct InstabilityConfig {
    double r0 = 0.2;
    double R0 = 0.8;
    std::vector<double> offsets{0.0, 0.02, 0.05, 0.1, 0.3};
    Nonlinearity nonlinearity = Nonlinearity::constant(1.0);
    int n = 192;
    double gradient_rel = 1e-8;
    std::filesystem::path output_dir;
};

struct InstabilityEntry {
    double a = 0.0;
    double h = 0.0;
    std::optional<CriticalRing> ring;
    int isolated_points = 0;
    double max_cluster_diameter = 0.0;
    std::vector<CriticalPoint> points;
};

struct InstabilityReport {
    std::vector<InstabilityEntry> entries;
    /// Ring exactly at a = 0, two isolated points with clusters ≤ 4h elsewhere.
    bool consistent = false;
};

InstabilityConfig instability_preset();
std::vector<std::string> validate_instability(const InstabilityConfig& config);
InstabilityReport instability_sweep(const InstabilityConfig& config);

/// Radius of the critical circle of the concentric solution with constant f.
double radial_critical_radius(double r0, double R0);

// Serialization of the external file formats.
Json to_json(const VerdictReport& report, std::string_view timestamp);
Json critical_points_json(const std::vector<CriticalPoint>& points);
Json sweep_json(const std::vector<ReflectionReport>& reports);
Json instability_json(const InstabilityReport& report);
Json grid_json(const Grid& grid);
Json domain_json(const DomainSpec& spec);
Json nonlinearity_json(const Nonlinearity& f);
std::string field_csv(const ScalarField& field);
std::string curves_csv(const std::vector<std::vector<Vec2>>& curves);
std::string level_sets_csv(const std::vector<LevelSet>& levels);

/// Parses {"variant": ..., "params": {...}} with exact variant and parameter names.
DomainSpec parse_domain(const Json& j);
Nonlinearity parse_nonlinearity(const Json& j);

}  // namespace annulus_critic
