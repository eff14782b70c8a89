#pragma once

#include <span>
#include <vector>

#include "annulus_critic/field.hpp"

namespace annulus_critic {

struct Polyline {
    std::vector<Vec2> points;
    bool closed = false;
};

/// Marching squares over cells whose four corners are interior nodes, with
/// linear edge interpolation; saddle cells are resolved by the sign of the
/// cell-center (corner mean) value. Segments are linked into maximal polylines;
/// closed ones run counter-clockwise.
std::vector<Polyline> marching_squares(const Grid& grid, std::span<const double> nodal, double level);

enum class CurveEnd { Inner, Outer, Closed };

std::string_view to_string(CurveEnd e);

/// A connected piece of the zero set of u_θ = ∇u·θ.
struct NodalCurve {
    Vec2 direction;
    std::vector<Vec2> polyline;
    std::array<CurveEnd, 2> endpoint_boundaries{CurveEnd::Closed, CurveEnd::Closed};
    std::array<double, 2> endpoint_gaps{0.0, 0.0};  // distance from each end to that boundary

    bool closed() const { return endpoint_boundaries[0] == CurveEnd::Closed; }
};

std::vector<NodalCurve> nodal_set(const ScalarField& field, Vec2 theta);

struct LevelSet {
    double level = 0.0;
    std::vector<Polyline> curves;
};

/// Contours of u; every level must lie in (0, max u), else LevelOutOfRange.
std::vector<LevelSet> level_sets(const ScalarField& field, std::span<const double> levels);

/// Winding number of a closed polyline around p.
int winding_number(const std::vector<Vec2>& closed_polyline, Vec2 p);

/// True if some segment of the polyline strictly crosses the vertical line x = x0
/// at a point whose distance to ∂Ω exceeds `clearance`.
bool crosses_vertical(const DomainSpec& spec, const std::vector<Vec2>& polyline, double x0, double clearance);

/// Sign changes of u - u(p) around the circle of the given radius about p
/// (sampled at `samples` points); a nondegenerate saddle gives 4.
int level_branch_count(const ScalarField& field, Vec2 p, double radius, int samples = 720);

}  // namespace annulus_critic
