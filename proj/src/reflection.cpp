#include "annulus_critic/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "annulus_critic/errors.hpp"
#include "annulus_critic/parallel.hpp"

namespace annulus_critic {

namespace {

constexpr double kInsideMargin = 1e-12;

bool strictly_inside(const DomainSpec& spec, Vec2 p) { return signed_distance(spec, p) < -kInsideMargin; }

struct Accumulator {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    int violations = 0;
    int pairs = 0;

    void add(double d, int expected_sign, double tol) {
        min = std::min(min, d);
        max = std::max(max, d);
        if (expected_sign * d < -tol) ++violations;
        ++pairs;
    }
};

// Outward derivative of u across T at interior sample points at least 2h from ∂Ω.
bool outward_derivative_consistent(const ScalarField& field, const std::vector<Vec2>& samples,
                                   const std::vector<Vec2>& outward, int expected_sign) {
    const DomainSpec& spec = field.grid().domain();
    const double clearance = 2.0 * field.grid().h();
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (signed_distance(spec, samples[k]) >= -clearance) continue;
        const double d = dot(gradient(field, samples[k]), outward[k]);
        if (!(-expected_sign * d > 0.0)) return false;
    }
    return true;
}

ReflectionReport empty_report(double lambda) {
    ReflectionReport r;
    r.lambda = lambda;
    r.region = "empty";
    return r;
}

void require_some_pairs(const SweepResult& s, const char* who) {
    const bool any = std::any_of(s.reports.begin(), s.reports.end(),
                                 [](const ReflectionReport& r) { return r.n_pairs > 0 || r.limit_exceeded; });
    if (!any) throw EmptyRegion(std::string(who) + ": no sampled lambda has interior node pairs");
}

}  // namespace

std::vector<double> LambdaRange::samples(int steps) const {
    if (steps < 2) throw std::invalid_argument("LambdaRange::samples: steps must be >= 2");
    std::vector<double> out(static_cast<std::size_t>(steps));
    const double w = hi - lo;
    for (int k = 0; k < steps; ++k) {
        double v;
        if (include_lo && include_hi)
            v = lo + w * k / (steps - 1);
        else if (include_lo)
            v = lo + w * k / steps;
        else if (include_hi)
            v = lo + w * (k + 1) / steps;
        else
            v = lo + w * (k + 1) / (steps + 1);
        out[static_cast<std::size_t>(k)] = v;
    }
    return out;
}

double inner_radius(const DomainSpec& spec) {
    if (spec.is<ConcentricAnnulus>()) return spec.as<ConcentricAnnulus>().r0;
    if (spec.is<EccentricAnnulus>()) return spec.as<EccentricAnnulus>().r;
    if (spec.is<PetalEllipse>()) return spec.as<PetalEllipse>().a_in;
    if (spec.is<PetalPolygon>()) return spec.as<PetalPolygon>().a_in;
    throw UnsupportedVariant("inner boundary of " + std::string(spec.variant_name()) + " is not a circle");
}

double reflection_difference(const ScalarField& field, const ReflectionLine& line, Vec2 q) {
    return sample(field, q) - sample(field, line.mirror(q));
}

ReflectionReport plane_difference(const ScalarField& field, const ReflectionLine& line,
                                  const ReflectionOptions& options) {
    const Grid& g = field.grid();
    const DomainSpec& spec = g.domain();
    const double tol = options.violation_tol_rel * field.max_abs();
    Accumulator acc;
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        const Vec2 p = g.node(k);
        if (!(line.offset(p) > 0.0)) continue;
        const Vec2 m = line.mirror(p);
        if (!strictly_inside(spec, m)) continue;
        acc.add(field[k] - sample(field, m), options.expected_sign, tol);
    }
    if (acc.pairs == 0) throw EmptyRegion("plane_difference: no interior node pairs across the line");

    ReflectionReport r;
    r.lambda = dot(line.point, line.normal);
    r.region = "half-plane n=(" + std::to_string(line.normal.x) + "," + std::to_string(line.normal.y) + ")";
    r.min_diff = acc.min;
    r.max_diff = acc.max;
    r.violations = acc.violations;
    r.n_pairs = acc.pairs;

    // Samples along T inside Ω; the outward normal of Σ there is -normal.
    const Vec2 along{-line.normal.y, line.normal.x};
    const Vec2 half = half_extent(spec);
    const double reach = std::hypot(half.x, half.y) + norm(line.point);
    std::vector<Vec2> pts, outward;
    for (double s = -reach; s <= reach; s += g.h()) {
        const Vec2 q = line.point + along * s;
        if (strictly_inside(spec, q)) {
            pts.push_back(q);
            outward.push_back(-line.normal);
        }
    }
    r.normal_derivative_consistent = outward_derivative_consistent(field, pts, outward, options.expected_sign);
    r.flagged = r.violations > 0;
    return r;
}

ReflectionReport sphere_difference(const ScalarField& field, Vec2 center, double lambda,
                                   const ReflectionOptions& options) {
    const Grid& g = field.grid();
    const DomainSpec& spec = g.domain();
    const double r_in = inner_radius(spec);
    if (!(lambda > r_in)) throw EmptyRegion("sphere_difference: lambda must exceed the inner radius");
    const double tol = options.violation_tol_rel * field.max_abs();
    Accumulator acc;
    int region = 0;
    int outside = 0;
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        const Vec2 p = g.node(k);
        const Vec2 d = p - center;
        const double rho2 = dot(d, d);
        const double rho = std::sqrt(rho2);
        if (!(rho > r_in && rho < lambda)) continue;
        ++region;
        const Vec2 q = center + d * (lambda * lambda / rho2);
        if (!strictly_inside(spec, q)) {
            ++outside;
            continue;
        }
        acc.add(field[k] - sample(field, q), options.expected_sign, tol);
    }
    if (region == 0 || acc.pairs == 0) throw EmptyRegion("sphere_difference: no interior nodes in the ring");
    if (outside > region / 100)
        throw InvertedPointOutside("sphere_difference: " + std::to_string(outside) + " of " + std::to_string(region) +
                                   " inverted points fall outside the domain at lambda=" + std::to_string(lambda));

    ReflectionReport r;
    r.lambda = lambda;
    r.region = "ring about (" + std::to_string(center.x) + "," + std::to_string(center.y) + ")";
    r.min_diff = acc.min;
    r.max_diff = acc.max;
    r.violations = acc.violations;
    r.n_pairs = acc.pairs;
    r.images_outside = outside;

    std::vector<Vec2> pts, outward;
    const int n_circle = std::max(64, static_cast<int>(2.0 * std::numbers::pi * lambda / g.h()));
    for (int s = 0; s < n_circle; ++s) {
        const double t = 2.0 * std::numbers::pi * s / n_circle;
        const Vec2 dir{std::cos(t), std::sin(t)};
        const Vec2 q = center + dir * lambda;
        if (strictly_inside(spec, q)) {
            pts.push_back(q);
            outward.push_back(dir);
        }
    }
    r.normal_derivative_consistent = outward_derivative_consistent(field, pts, outward, options.expected_sign);
    r.flagged = r.violations > 0;
    return r;
}

SweepResult sweep_plane(const ScalarField& field, Vec2 normal, const LambdaRange& range, int steps,
                        const ReflectionOptions& options) {
    const auto lambdas = range.samples(steps);
    SweepResult out;
    out.reports.resize(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t k) {
        try {
            out.reports[k] = plane_difference(field, ReflectionLine::at_offset(normal, lambdas[k]), options);
        } catch (const EmptyRegion&) {
            // The cap beyond T holds no lattice pair at this resolution; vacuously sign-correct.
            out.reports[k] = empty_report(lambdas[k]);
        }
    });
    require_some_pairs(out, "sweep_plane");
    for (const auto& r : out.reports) {
        if (r.flagged && !out.first_violation) out.first_violation = r.lambda;
    }
    return out;
}

SweepResult sweep_sphere(const ScalarField& field, const LambdaRange& range, int steps,
                         const ReflectionOptions& options) {
    const auto lambdas = range.samples(steps);
    const Vec2 center = inner_center(field.grid().domain());
    SweepResult out;
    out.reports.resize(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t k) {
        try {
            out.reports[k] = sphere_difference(field, center, lambdas[k], options);
        } catch (const EmptyRegion&) {
            out.reports[k] = empty_report(lambdas[k]);
        } catch (const InvertedPointOutside&) {
            ReflectionReport r;
            r.lambda = lambdas[k];
            r.region = "ring beyond inversion limit";
            r.limit_exceeded = true;
            r.flagged = true;
            out.reports[k] = r;
        }
    });
    require_some_pairs(out, "sweep_sphere");
    for (const auto& r : out.reports) {
        if (r.limit_exceeded) out.limit_exceeded = true;
        if (r.flagged && !out.first_violation) out.first_violation = r.lambda;
    }
    return out;
}

}  // namespace annulus_critic
