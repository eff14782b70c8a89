#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "annulus_critic/field.hpp"

namespace annulus_critic {

enum class CriticalKind { Maximum, Saddle, Degenerate };

std::string_view to_string(CriticalKind k);

struct Classification {
    CriticalKind kind = CriticalKind::Degenerate;
    std::array<double, 2> hessian_eigs{};  // ascending
};

struct CriticalPoint {
    Vec2 location;
    CriticalKind kind = CriticalKind::Degenerate;
    double grad_norm = 0.0;
    std::array<double, 2> hessian_eigs{};
    std::optional<std::string> axis;  // nearest symmetry axis within the assignment tolerance
    double axis_coordinate = 0.0;     // signed position along that axis
    int merged = 1;                   // raw Newton roots folded into this record
};

/// A closed chain of near-critical cells around the inner center, reported
/// in place of isolated points when the critical set is a circle.
struct CriticalRing {
    Vec2 center;
    double radius = 0.0;
    double radius_spread = 0.0;
    int samples = 0;
};

struct NearCriticalCluster {
    Vec2 centroid;
    double diameter = 0.0;
    int size = 0;
};

struct DetectionOptions {
    /// Acceptance bound on |∇u| relative to max |∇u| over nodes.
    double grad_tol_rel = 1e-8;
    /// Near-critical bound on the cell minimum of |∇u| relative to max |∇u|.
    double near_tol_rel = 1e-3;
    double merge_radius_h = 2.0;
    double axis_tol_h = 3.0;
    double corner_guard_h = 2.0;
    /// Ring requirements: more than this many near-critical samples ...
    int ring_min_samples = 20;
    /// ... with consecutive gaps and radius spread below this (in h).
    double ring_gap_h = 3.0;
};

struct CriticalSet {
    std::vector<CriticalPoint> points;
    std::optional<CriticalRing> ring;
    std::vector<NearCriticalCluster> clusters;  // single-linkage groups of near-critical samples
    std::vector<Vec2> near_critical;            // in-cell minimizers of |∇u| below the near bound
    int candidate_cells = 0;
    double grad_tol = 0.0;
    double near_tol = 0.0;

    double max_cluster_diameter() const;
};

/// Curvature threshold separating definite from degenerate Hessians:
/// 1e-6 max|u| / gap^2 with gap the minimum boundary separation.
double hessian_threshold(const ScalarField& field);

Classification classify(const ScalarField& field, Vec2 p);
Classification classify(const ScalarField& field, Vec2 p, double tau_h);

/// Cells where both blended gradient components change sign are refined by
/// Newton inside the cell; roots with |∇u| below the tolerance are merged,
/// classified and tagged with their nearest symmetry axis.
CriticalSet find_critical_points(const ScalarField& field, const DetectionOptions& options = {});

struct AxisCount {
    std::string axis;
    int count = 0;
};

struct AxisCounts {
    std::vector<AxisCount> per_axis;
    int off_axis = 0;

    int count(std::string_view axis) const;
};

/// Assigns each point to the nearest axis line closer than tau_d.
AxisCounts count_by_axis(const std::vector<CriticalPoint>& points, const std::vector<SymmetryAxis>& axes,
                         double tau_d);

struct MorseBalance {
    int n_max = 0;
    int n_saddle = 0;
    int n_degenerate = 0;
    bool balanced = false;
};

MorseBalance morse_balance(const std::vector<CriticalPoint>& points);

}  // namespace annulus_critic
