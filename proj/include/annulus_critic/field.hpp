#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "annulus_critic/grid.hpp"

namespace annulus_critic {

struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

/// Nodal values of a function on the interior nodes of a grid, with an
/// implied zero Dirichlet value at every boundary crossing. Immutable.
///
/// Nodal first and second derivatives are those of the local 3-point
/// quadratic in each lattice direction (shortened legs at the boundary);
/// the mixed derivative uses the 2x2 cross difference where available.
class ScalarField {
public:
    ScalarField(std::shared_ptr<const Grid> grid, std::vector<double> values);

    /// Evaluates fn at every interior node.
    static ScalarField from_function(std::shared_ptr<const Grid> grid, const std::function<double(Vec2)>& fn);

    const Grid& grid() const noexcept { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Value at lattice node (i, j); zero for exterior nodes.
    double at(int i, int j) const noexcept {
        const int k = grid_->unknown(i, j);
        return k == Grid::kExterior ? 0.0 : values_[static_cast<std::size_t>(k)];
    }
    Vec2 nodal_gradient(std::size_t k) const noexcept { return gradient_[k]; }
    const Sym2& nodal_hessian(std::size_t k) const noexcept { return hessian_[k]; }

    double max_value() const noexcept { return max_value_; }
    double max_abs() const noexcept { return max_abs_; }
    double max_gradient_norm() const noexcept { return max_gradient_norm_; }

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
    std::vector<Vec2> gradient_;
    std::vector<Sym2> hessian_;
    double max_value_ = 0.0;
    double max_abs_ = 0.0;
    double max_gradient_norm_ = 0.0;
};

/// Interpolated value at a strictly interior point: biquadratic on the 3x3
/// block around the nearest node, or on a block shifted one node inward, when
/// such a block is interior; near ∂Ω a weighted quadratic fit through nearby
/// nodes and the zero boundary crossings; bilinear with ghost corners as a last
/// resort. Throws OutsideDomain within 1e-12 of ∂Ω or outside.
double sample(const ScalarField& field, Vec2 p);

/// Gradient at p: bilinear blend of the nodal derivatives of the cell
/// containing p (continuous across cells, exact for quadratics).
Vec2 gradient(const ScalarField& field, Vec2 p);

/// Hessian at p, blended from nodal second derivatives like gradient().
Sym2 hessian(const ScalarField& field, Vec2 p);

/// Nodal derivative of u along unit direction theta, one entry per interior node.
std::vector<double> directional_derivative(const ScalarField& field, Vec2 theta);

}  // namespace annulus_critic
