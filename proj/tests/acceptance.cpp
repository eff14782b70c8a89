// Acceptance run: one PASS/FAIL line per criterion, exit status = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "annulus_critic/contour.hpp"
#include "annulus_critic/critical.hpp"
#include "annulus_critic/experiment.hpp"
#include "annulus_critic/reflection.hpp"
#include "annulus_critic/solver.hpp"
#include "support.hpp"

using namespace annulus_critic;
using test_support::RadialSolution;

namespace {

// Pinned tolerances.
constexpr double kRadialErrorRel = 5e-4;
constexpr double kRingRadiusTol = 5e-3;
constexpr double kRuntime1 = 30.0;
constexpr double kRuntime2 = 60.0;
constexpr double kAxisBandH = 3.0;
constexpr double kMirrorMatchH = 2.0;
constexpr double kSlackH = 2.0;
constexpr int kSweepSamples = 20;
constexpr double kClusterH = 4.0;
constexpr double kRingRadius5 = 0.46518;
constexpr double kNodalGapH = 2.0;
constexpr int kNewtonLimit = 12;
constexpr double kResidual = 1e-10;
constexpr double kSymmetryTol = 1e-9;
constexpr double kConvergenceFactor = 3.0;
constexpr int kReferenceN = 256;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

const SolveResult& solved(const DomainSpec& spec, int n, const Nonlinearity& f = Nonlinearity::constant(1.0)) {
    return test_support::solved(spec, n, f);
}

const CriticalSet& critical(const DomainSpec& spec, int n) { return test_support::critical_of(spec, n); }

// ----------------------------------------------------------------------------

void radial_oracle(Verdict& v) {
    const DomainSpec spec = ConcentricAnnulus{1.0, 2.0};
    const RadialSolution exact{1.0, 2.0};
    const auto& u = solved(spec, 128).field;
    double err = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) err = std::max(err, std::abs(u[k] - exact(u.grid().node(k))));
    std::mt19937 rng(1);
    for (int s = 0; s < 4000; ++s) {
        const Vec2 p = test_support::random_interior(spec, rng, 1e-9);
        err = std::max(err, std::abs(sample(u, p) - exact(p)));
    }
    const double rel = err / u.max_abs();
    const auto& cs = critical(spec, 128);
    const double target = std::sqrt(3.0 / (2.0 * std::log(2.0)));
    v.detail << "max err/max|u|=" << rel;
    v.require(rel <= kRadialErrorRel, "error <= 5e-4 max|u|");
    if (cs.ring) {
        v.detail << " ring radius=" << cs.ring->radius << " (target " << target << ")";
        v.require(std::abs(cs.ring->radius - target) <= kRingRadiusTol, "ring radius within 5e-3");
    } else {
        v.require(false, "no critical ring");
    }
    v.require(cs.points.empty(), "no isolated points");
}

// Criterion 2 checks on an already solved Example 2 field.
void example2_counts(Verdict& v, const ScalarField& u, const CriticalSet& cs) {
    const double h = u.grid().h();
    v.detail << " points=" << cs.points.size();
    v.require(cs.points.size() == 2, "exactly 2 critical points");
    for (const auto& p : cs.points) {
        v.detail << " " << to_string(p.kind) << "(" << p.location.x << "," << p.location.y << ")";
        v.require(std::abs(p.location.y) < kAxisBandH * h, "|y| < 3h");
        if (p.kind == CriticalKind::Maximum) v.require(p.location.x > -0.8 && p.location.x < 0.1, "max x in (-0.8,0.1)");
        if (p.kind == CriticalKind::Saddle) v.require(p.location.x > 0.5 && p.location.x < 0.8, "saddle x in (0.5,0.8)");
    }
    const auto mb = morse_balance(cs.points);
    v.detail << " morse=(" << mb.n_max << "," << mb.n_saddle << ")";
    v.require(mb.n_max == 1 && mb.n_saddle == 1 && mb.n_degenerate == 0, "Morse balance (1,1)");
}

void example2(Verdict& v) {
    const auto& s = solved(test_support::example2(), 192);
    example2_counts(v, s.field, critical(test_support::example2(), 192));
}

void example1(Verdict& v) {
    const DomainSpec& spec = test_support::example1();
    const auto& u = solved(spec, 192).field;
    const double h = u.grid().h();
    const auto& cs = critical(spec, 192);
    v.detail << "points=" << cs.points.size();
    v.require(cs.points.size() == 4, "exactly 4 critical points");
    int max_on_x = 0, saddle_on_y = 0;
    for (const auto& p : cs.points) {
        v.detail << " " << to_string(p.kind) << "(" << p.location.x << "," << p.location.y << ")";
        if (p.kind == CriticalKind::Maximum && std::abs(p.location.y) < kAxisBandH * h) ++max_on_x;
        if (p.kind == CriticalKind::Saddle && std::abs(p.location.x) < kAxisBandH * h) ++saddle_on_y;
    }
    v.require(max_on_x == 2, "2 maxima on the x-axis");
    v.require(saddle_on_y == 2, "2 saddles on the y-axis");
    const auto counts = count_by_axis(cs.points, symmetry_axes(spec).axes, kAxisBandH * h);
    v.detail << " off_axis=" << counts.off_axis;
    v.require(counts.off_axis == 0, "off-axis count 0");
    for (Vec2 flip : {Vec2{-1.0, 1.0}, Vec2{1.0, -1.0}}) {
        for (const auto& p : cs.points) {
            const Vec2 m{p.location.x * flip.x, p.location.y * flip.y};
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : cs.points) best = std::min(best, distance(m, q.location));
            v.require(best <= kMirrorMatchH * h, "set symmetric within 2h");
        }
    }
}

void containment(Verdict& v) {
    double worst_h = std::numeric_limits<double>::infinity();
    for (const DomainSpec& spec : {test_support::example2(), test_support::example1()}) {
        const auto& u = solved(spec, 192).field;
        const double h = u.grid().h();
        const auto region = exclusion_region(spec);
        for (const auto& p : critical(spec, 192).points) {
            const double slack = region.margin(p.location) / h;
            worst_h = std::min(worst_h, slack);
            if (slack < kSlackH) {
                v.detail << " " << spec.variant_name() << " " << to_string(p.kind) << " slack=" << slack << "h";
                v.require(false, "slack >= 2h");
            }
            v.require(slack > 0.0, "strictly admissible");
        }
    }
    v.detail << " min slack=" << worst_h << "h";

    struct Sweep {
        const DomainSpec* spec;
        bool sphere;
        Vec2 normal;
        LambdaRange range;
    };
    const Sweep sweeps[] = {{&test_support::example2(), false, {1.0, 0.0}, {0.65, 0.8, true, false}},
                            {&test_support::example1(), false, {1.0, 0.0}, {3.5, 6.0, true, false}},
                            {&test_support::example2(), true, {}, {0.2, 0.31623, false, true}},
                            {&test_support::example1(), true, {}, {1.0, 2.0, false, true}}};
    int violations = 0, pairs = 0;
    for (const auto& s : sweeps) {
        const auto& u = solved(*s.spec, 192).field;
        const auto res = s.sphere ? sweep_sphere(u, s.range, kSweepSamples) : sweep_plane(u, s.normal, s.range, kSweepSamples);
        for (const auto& r : res.reports) {
            violations += r.violations;
            pairs += r.n_pairs;
        }
        v.require(!res.limit_exceeded, "sphere sweep within inversion limit");
    }
    v.detail << " sweep violations=" << violations << " pairs=" << pairs;
    v.require(violations == 0, "zero sweep violations");
    v.require(pairs > 0, "sweeps compared node pairs");
}

void instability(Verdict& v) {
    const auto cfg = instability_preset();
    const auto report = instability_sweep(cfg);
    for (const auto& e : report.entries) {
        if (e.a == 0.0) {
            v.require(e.ring.has_value(), "ring at a=0");
            if (e.ring) {
                v.detail << " a=0 ring=" << e.ring->radius;
                v.require(std::abs(e.ring->radius - kRingRadius5) <= kRingRadiusTol, "ring radius 0.46518 +- 5e-3");
            }
        } else {
            v.detail << " a=" << e.a << ":" << e.isolated_points << "pts/" << e.max_cluster_diameter / e.h << "h";
            v.require(!e.ring, "no ring for a>0");
            v.require(e.isolated_points == 2, "2 isolated points for a>0");
            v.require(e.max_cluster_diameter <= kClusterH * e.h, "cluster <= 4h");
        }
    }
}

void nodal(Verdict& v) {
    const DomainSpec& spec = test_support::example2();
    const auto& u = solved(spec, 192).field;
    const double h = u.grid().h();
    const Vec2 hole = inner_center(spec);
    int open = 0, closed = 0;
    double worst_gap = 0.0;
    for (int k = 0; k < 8; ++k) {
        const Vec2 theta{std::cos(std::numbers::pi * k / 8.0), std::sin(std::numbers::pi * k / 8.0)};
        for (const auto& c : nodal_set(u, theta)) {
            if (c.closed()) {
                ++closed;
                v.require(winding_number(c.polyline, hole) != 0, "closed curves enclose the inner boundary");
            } else {
                ++open;
                worst_gap = std::max({worst_gap, c.endpoint_gaps[0], c.endpoint_gaps[1]});
            }
            if (k == 0) v.require(!crosses_vertical(spec, c.polyline, 0.3, 0.0), "theta=(1,0) avoids x=0.3");
        }
    }
    v.detail << "open=" << open << " closed=" << closed << " worst end gap=" << worst_gap / h << "h";
    v.require(worst_gap <= kNodalGapH * h, "ends within 2h of the boundary");
}

void nonlinear(Verdict& v) {
    const auto f = Nonlinearity::exp_decreasing(1.0, 1.0);
    const auto& s = solved(test_support::example2(), 192, f);
    v.detail << "newton=" << s.newton_steps << " residual=" << s.residual;
    v.require(s.newton_steps <= kNewtonLimit, "<= 12 Newton steps");
    v.require(s.residual <= kResidual, "residual <= 1e-10");
    example2_counts(v, s.field, find_critical_points(s.field));
}

// Lattice reflection of node (i, j) across a symmetry axis, or false when the
// reflection is not a lattice map.
bool mirror_node(const Grid& g, Vec2 dir, int i, int j, int& mi, int& mj) {
    const double c = std::abs(dir.x), s = std::abs(dir.y);
    if (s < 1e-15) {
        mi = i, mj = g.ny() - 1 - j;
    } else if (c < 1e-15) {
        mi = g.nx() - 1 - i, mj = j;
    } else if (std::abs(c - s) < 1e-12 && g.nx() == g.ny()) {
        if (dir.x * dir.y > 0) {
            mi = j, mj = i;
        } else {
            mi = g.nx() - 1 - j, mj = g.ny() - 1 - i;
        }
    } else {
        return false;
    }
    return true;
}

double sampled_gap(const ScalarField& a, const ScalarField& b, const DomainSpec& spec, double clearance) {
    std::mt19937 rng(5);
    double m = 0.0;
    for (int s = 0; s < 2000; ++s) {
        const Vec2 p = test_support::random_interior(spec, rng, clearance);
        m = std::max(m, std::abs(sample(a, p) - sample(b, p)));
    }
    return m;
}

void properties(Verdict& v) {
    for (const auto& [name, spec] : test_support::all_variants()) {
        int positivity = 0, comparison = 0, lattice_axes = 0;
        double sym = 0.0;
        for (int n : {64, 128}) {
            const auto& u = solved(spec, n).field;
            const auto& u2 = solved(spec, n, Nonlinearity::constant(2.0)).field;
            const Grid& g = u.grid();
            for (std::size_t k = 0; k < u.size(); ++k) {
                positivity += !(u[k] > 0.0);
                comparison += !(u2[k] >= u[k]);
            }
            for (const auto& axis : symmetry_axes(spec).axes) {
                bool lattice = true;
                for (int j = 0; j < g.ny() && lattice; ++j)
                    for (int i = 0; i < g.nx() && lattice; ++i) {
                        int mi, mj;
                        if (!mirror_node(g, axis.direction, i, j, mi, mj)) {
                            lattice = false;
                            break;
                        }
                        const int a = g.unknown(i, j), b = g.unknown(mi, mj);
                        if (a == Grid::kExterior || b == Grid::kExterior) {
                            if (a != b) sym = std::max(sym, 1.0);
                            continue;
                        }
                        sym = std::max(sym, std::abs(u[a] - u[b]));
                    }
                lattice_axes += lattice;
            }
        }
        // Convergence against the analytic solution when known, else against a finer grid.
        const auto& u64 = solved(spec, 64).field;
        const auto& u128 = solved(spec, 128).field;
        const double clearance = 3.0 * u64.grid().h();
        double e64, e128;
        if (spec.is<ConcentricAnnulus>()) {
            const auto& ca = spec.as<ConcentricAnnulus>();
            const RadialSolution exact{ca.r0, ca.R0};
            const auto field = ScalarField::from_function(solved(spec, kReferenceN).field.grid_ptr(), [&](Vec2 p) { return exact(p); });
            e64 = sampled_gap(u64, field, spec, clearance);
            e128 = sampled_gap(u128, field, spec, clearance);
        } else {
            const auto& ref = solved(spec, kReferenceN).field;
            e64 = sampled_gap(u64, ref, spec, clearance);
            e128 = sampled_gap(u128, ref, spec, clearance);
        }
        const double factor = e64 / e128;
        v.detail << " " << name << ":sym=" << sym << ",axes=" << lattice_axes << ",factor=" << factor;
        v.require(positivity == 0, name + " u > 0");
        v.require(comparison == 0, name + " comparison in f");
        v.require(sym <= kSymmetryTol, name + " symmetry 1e-9");
        v.require(lattice_axes > 0, name + " some symmetry axis checked");
        v.require(factor >= kConvergenceFactor, name + " convergence factor >= 3");
    }
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<void(Verdict&)> body;
        double time_limit;
    };
    const Criterion criteria[] = {
        {1, "radial oracle", radial_oracle, kRuntime1},
        {2, "example 2 counts and placement", example2, kRuntime2},
        {3, "example 1 counts and placement", example1, 0.0},
        {4, "exclusion containment and sweeps", containment, 0.0},
        {5, "instability sweep", instability, 0.0},
        {6, "nodal-set structure", nodal, 0.0},
        {7, "exp(-u) regression", nonlinear, 0.0},
        {8, "property suites", properties, 0.0},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit > 0.0) v.require(secs < c.time_limit, "runtime limit");
        failures += !v.pass;
        std::printf("%s criterion %d (%s) %.2fs: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.title, secs,
                    v.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures;
}
