#pragma once

#include <optional>
#include <string>
#include <vector>

#include "annulus_critic/field.hpp"

namespace annulus_critic {

/// Reflection line T = {p : (p - point)·normal = 0}; the compared half-domain is
/// Σ = {p ∈ Ω : (p - point)·normal > 0}.
struct ReflectionLine {
    Vec2 point;
    Vec2 normal;  // unit

    static ReflectionLine at_offset(Vec2 normal, double lambda) { return {normal * lambda, normal}; }
    Vec2 mirror(Vec2 p) const { return p - normal * (2.0 * dot(p - point, normal)); }
    double offset(Vec2 p) const { return dot(p - point, normal); }
};

struct ReflectionOptions {
    /// Differences beyond tol_rel * max|u| on the wrong side count as violations.
    double violation_tol_rel = 1e-7;
    /// Expected sign of the difference inside Σ (-1 or +1).
    int expected_sign = -1;
};

struct ReflectionReport {
    double lambda = 0.0;
    std::string region;  // half-domain or ring identifier
    double min_diff = 0.0;
    double max_diff = 0.0;
    int violations = 0;
    int n_pairs = 0;
    /// Sign of the derivative of u across T (outward from Σ) matches the expected strict sign.
    bool normal_derivative_consistent = true;
    int images_outside = 0;       // sphere: inverted points that left Ω
    bool limit_exceeded = false;  // sphere: too many inverted points outside Ω
    bool flagged = false;
};

struct SweepResult {
    std::vector<ReflectionReport> reports;
    std::optional<double> first_violation;
    bool limit_exceeded = false;
};

struct LambdaRange {
    double lo = 0.0;
    double hi = 0.0;
    bool include_lo = true;
    bool include_hi = false;

    /// `steps` uniformly spaced values honoring the open/closed ends.
    std::vector<double> samples(int steps) const;
};

/// u(q) - u(mirror(q)) at an arbitrary interior point.
double reflection_difference(const ScalarField& field, const ReflectionLine& line, Vec2 q);

/// w(p) = u(p) - u(p_λ) over interior nodes p of Σ with interior mirrors.
/// Throws EmptyRegion when no such pair exists.
ReflectionReport plane_difference(const ScalarField& field, const ReflectionLine& line,
                                  const ReflectionOptions& options = {});

/// ψ(p) = u(p) - u(p^λ) with p^λ = c + λ²(p - c)/|p - c|² for interior nodes
/// with r_in < |p - c| < λ, where c and r_in describe the circular inner boundary.
/// Throws EmptyRegion, InvertedPointOutside (> 1% of images outside Ω) or
/// UnsupportedVariant (non-circular inner boundary).
ReflectionReport sphere_difference(const ScalarField& field, Vec2 center, double lambda,
                                   const ReflectionOptions& options = {});

/// Planes {x·normal = λ} for λ sampled over the range; Σ lies on the +normal side.
SweepResult sweep_plane(const ScalarField& field, Vec2 normal, const LambdaRange& range, int steps,
                        const ReflectionOptions& options = {});

/// Spheres about the inner-boundary center; samples whose inverted images
/// leave Ω are reported with limit_exceeded instead of throwing.
SweepResult sweep_sphere(const ScalarField& field, const LambdaRange& range, int steps,
                         const ReflectionOptions& options = {});

/// Radius of the circular inner boundary (UnsupportedVariant otherwise).
double inner_radius(const DomainSpec& spec);

}  // namespace annulus_critic
