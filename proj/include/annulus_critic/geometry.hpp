#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "annulus_critic/vec2.hpp"

namespace annulus_critic {

// Annular domain families. The outer boundary is always centered at the origin.

/// Two concentric circles, radii r0 < R0.
struct ConcentricAnnulus {
    double r0 = 0.0;
    double R0 = 0.0;
};

/// Outer circle radius R at the origin, inner circle radius r at (a, 0).
struct EccentricAnnulus {
    double a = 0.0;
    double r = 0.0;
    double R = 0.0;
};

/// Outer ellipse with semi-axes b1 (x) and b2 (y), inner circle radius a_in.
struct PetalEllipse {
    double a_in = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
};

/// Regular k-gon of circumradius rho (one vertex on +x), inner circle radius a_in.
struct PetalPolygon {
    double a_in = 0.0;
    int k = 3;
    double rho = 0.0;
};

/// Outer ellipse (b1, b2); the inner ellipse is the outer one scaled by s.
struct ScaledEllipseAnnulus {
    double b1 = 0.0;
    double b2 = 0.0;
    double s = 0.0;
};

using DomainVariant =
    std::variant<ConcentricAnnulus, EccentricAnnulus, PetalEllipse, PetalPolygon, ScaledEllipseAnnulus>;

class DomainSpec {
public:
    DomainSpec() = default;
    template <class V>
        requires std::is_constructible_v<DomainVariant, V>
    DomainSpec(V v) : shape_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

    const DomainVariant& shape() const noexcept { return shape_; }
    template <class V>
    bool is() const noexcept { return std::holds_alternative<V>(shape_); }
    template <class V>
    const V& as() const { return std::get<V>(shape_); }

    std::string_view variant_name() const;

private:
    DomainVariant shape_;
};

enum class AxisClass { Long, Short, Other };

std::string_view to_string(AxisClass c);

struct SymmetryAxis {
    Vec2 direction;          // unit
    Vec2 anchor;             // outer-boundary center
    AxisClass classification = AxisClass::Other;
    std::string name;
};

struct SymmetryAxes {
    std::vector<SymmetryAxis> axes;
    /// Set for ConcentricAnnulus; the listed axes are then only representatives.
    bool full_rotational = false;
};

struct Box {
    double xlo, xhi, ylo, yhi;
    bool contains_open(Vec2 p) const { return p.x > xlo && p.x < xhi && p.y > ylo && p.y < yhi; }
    /// Distance to the nearest side, negative outside.
    double margin(Vec2 p) const;
};

/// Admissible set for critical points: (box ∩ Ω) minus the half-open ring
/// r_lo < |p - center| <= r_hi.
struct ExclusionRegion {
    Box allowed_box;
    Vec2 annulus_center;
    double r_lo = 0.0;
    double r_hi = 0.0;

    /// Signed clearance of p from the forbidden parts (box exterior and ring).
    /// Positive inside the admissible set; does not test Ω membership.
    double margin(Vec2 p) const;
};

struct BoundaryPolylines {
    std::vector<Vec2> inner;  // closed (last point != first), counterclockwise
    std::vector<Vec2> outer;
};

struct BoundaryDistances {
    double inner;  // unsigned distance to the inner boundary curve
    double outer;
};

/// Every violated invariant as a human-readable message; empty iff valid.
std::vector<std::string> validate(const DomainSpec& spec);

bool contains(const DomainSpec& spec, Vec2 p);

/// Negative inside Ω, positive outside, zero on ∂Ω.
double signed_distance(const DomainSpec& spec, Vec2 p);

BoundaryDistances boundary_distances(const DomainSpec& spec, Vec2 p);

SymmetryAxes symmetry_axes(const DomainSpec& spec);

/// Throws UnsupportedVariant unless the spec is an EccentricAnnulus or PetalEllipse.
ExclusionRegion exclusion_region(const DomainSpec& spec);

BoundaryPolylines boundary_polylines(const DomainSpec& spec, int n);

/// Center of the inner boundary curve.
Vec2 inner_center(const DomainSpec& spec);

/// Half-widths (X, Y) of the tight bounding box, which is symmetric about both axes.
Vec2 half_extent(const DomainSpec& spec);

/// Smallest distance between the inner and outer boundary curves (lower bound for polygons).
double min_boundary_gap(const DomainSpec& spec);

/// Polygon vertices (empty for other variants).
std::vector<Vec2> corner_points(const DomainSpec& spec);

namespace detail {
// Signed distance to a filled ellipse centered at the origin; exposed for testing.
double ellipse_signed_distance(double a, double b, Vec2 p);
double regular_polygon_signed_distance(int k, double rho, Vec2 p);
}  // namespace detail

}  // namespace annulus_critic
