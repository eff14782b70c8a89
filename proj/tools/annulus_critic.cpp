#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "annulus_critic/errors.hpp"
#include "annulus_critic/experiment.hpp"

namespace ac = annulus_critic;

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kConfigError = 2, kNonConvergence = 3 };

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ac::NonConvergence*>(&e)) return kNonConvergence;
    if (dynamic_cast<const ac::ParseError*>(&e) || dynamic_cast<const ac::ValidationError*>(&e)) return kConfigError;
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        return exit_code_for(inner);
    } catch (...) {
    }
    return kCheckFailure;
}

void print_report(const ac::VerdictReport& r) {
    std::printf("grid h=%.6g interior=%zu  newton=%d residual=%.3e  max u=%.6g\n", r.h, r.interior_count,
                r.newton_steps, r.residual, r.max_u);
    for (const auto& c : r.checks)
        std::printf("  %-13s %s\n", std::string(ac::to_string(c.check)).c_str(),
                    std::string(ac::to_string(c.status)).c_str());
    std::printf("%s\n", r.all_passed() ? "PASS" : "FAIL");
}

void print_points(const std::vector<ac::CriticalPoint>& pts) {
    for (const auto& p : pts)
        std::printf("  %-10s (%+.6f, %+.6f)  |grad|=%.2e  axis=%s\n", std::string(ac::to_string(p.kind)).c_str(),
                    p.location.x, p.location.y, p.grad_norm, p.axis ? p.axis->c_str() : "-");
}

constexpr const char* kConfigHelp = R"(Config file (strict JSON, unknown keys rejected):
  {
    "name": "example2",                                   optional
    "domain": {"variant": "EccentricAnnulus",
               "params": {"a": 0.3, "r": 0.2, "R": 0.8}},  required
    "nonlinearity": {"kind": "Constant", "c": 1},         default Constant c=1
    "n": 192,                                             default 192, must be >= 32
    "tolerances": {"solver": 1e-10,                       residual bound
                   "gradient_rel": 1e-8,                  |grad u| bound relative to max |grad u|
                   "axis_h": 3},                          axis distance bound in units of h
    "checks": ["counts", "exclusion", "morse", "nodal", "plane-sweep", "sphere-sweep"],
    "sweep_steps": 20,                                    lambda samples per sweep
    "output_dir": "out"                                   optional; --out overrides
  }
Variants: ConcentricAnnulus{r0,R0} EccentricAnnulus{a,r,R} PetalEllipse{a_in,b1,b2}
          PetalPolygon{a_in,k,rho} ScaledEllipseAnnulus{b1,b2,s}
Nonlinearities: Constant{c} AffineDecreasing{c0,c1} ExpDecreasing{c0,c1}
Exit status: 0 all checks pass, 1 check failure, 2 configuration error, 3 solver non-convergence.)";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical points of semilinear Dirichlet solutions on annular domains"};
    app.footer(kConfigHelp);
    app.require_subcommand(1);

    std::string config_path, preset_name, out_dir;
    int n_override = 0;
    auto* run = app.add_subcommand("run", "Solve, detect critical points and verify the predictions");
    auto* cfg_opt = run->add_option("--config", config_path, "Experiment config (JSON)");
    auto* preset_opt = run->add_option("--preset", preset_name, "Compiled-in preset: example1, example2, instability");
    cfg_opt->excludes(preset_opt);
    run->add_option("--out", out_dir, "Output directory for artifacts");
    run->add_option("--n", n_override, "Override the grid resolution")->check(CLI::PositiveNumber);

    std::string sweep_preset = "instability";
    std::vector<double> offsets;
    std::string sweep_out;
    int sweep_n = 0;
    auto* sweep = app.add_subcommand("sweep", "Instability sweep over eccentric offsets of a concentric annulus");
    sweep->add_option("--preset", sweep_preset, "Sweep preset (instability)");
    sweep->add_option("--offsets", offsets, "Comma-separated offsets a")->delimiter(',');
    sweep->add_option("--out", sweep_out, "Output directory for sweep.json");
    sweep->add_option("--n", sweep_n, "Override the grid resolution")->check(CLI::PositiveNumber);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Parse and validate a config without solving");
    validate->add_option("--config", validate_path, "Experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*validate) {
            const auto c = ac::parse_config(validate_path);
            std::printf("valid: %s on %s, n=%d\n", c.name.c_str(), std::string(c.domain.variant_name()).c_str(), c.n);
            return kPass;
        }

        if (*sweep || (*run && preset_name == "instability")) {
            const std::string& name = *sweep ? sweep_preset : preset_name;
            if (name != "instability") throw ac::ValidationError("unknown sweep preset '" + name + "'");
            auto sc = ac::instability_preset();
            if (!offsets.empty()) sc.offsets = offsets;
            const int n = *sweep ? sweep_n : n_override;
            if (n) sc.n = n;
            sc.output_dir = *sweep ? sweep_out : out_dir;
            const auto rep = ac::instability_sweep(sc);
            for (const auto& e : rep.entries) {
                if (e.ring)
                    std::printf("a=%-6g ring radius=%.6f spread=%.2e\n", e.a, e.ring->radius, e.ring->radius_spread);
                else
                    std::printf("a=%-6g points=%d  largest cluster=%.2fh\n", e.a, e.isolated_points,
                                e.max_cluster_diameter / e.h);
            }
            std::printf("%s\n", rep.consistent ? "PASS" : "FAIL");
            return rep.consistent ? kPass : kCheckFailure;
        }

        if (!*cfg_opt && !*preset_opt) throw ac::ValidationError("run needs --config or --preset");
        ac::ExperimentConfig c = *cfg_opt ? ac::parse_config(config_path) : ac::preset(preset_name);
        if (n_override) c.n = n_override;
        if (!out_dir.empty()) c.output_dir = out_dir;
        const auto outcome = ac::run(c);
        print_points(outcome.critical.points);
        if (outcome.critical.ring)
            std::printf("  ring radius=%.6f about (%g, %g)\n", outcome.critical.ring->radius,
                        outcome.critical.ring->center.x, outcome.critical.ring->center.y);
        print_report(outcome.report);
        return outcome.report.all_passed() ? kPass : kCheckFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}
