#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "annulus_critic/field.hpp"

namespace annulus_critic {

/// Nonnegative, nonincreasing right-hand side f of Δu + f(u) = 0.
class Nonlinearity {
public:
    enum class Kind { Constant, AffineDecreasing, ExpDecreasing };

    /// f(u) = c, c >= 0.
    static Nonlinearity constant(double c);
    /// f(u) = c0 - c1 u, c0 > 0, c1 >= 0.
    static Nonlinearity affine_decreasing(double c0, double c1);
    /// f(u) = c0 exp(-c1 u), c0 > 0, c1 >= 0.
    static Nonlinearity exp_decreasing(double c0, double c1);

    Kind kind() const noexcept { return kind_; }
    double c0() const noexcept { return c0_; }
    double c1() const noexcept { return c1_; }
    std::string_view kind_name() const noexcept;

    double value(double u) const noexcept;
    double derivative(double u) const noexcept;
    bool derivative_is_zero() const noexcept { return kind_ == Kind::Constant || c1_ == 0.0; }

private:
    Nonlinearity(Kind kind, double c0, double c1) : kind_(kind), c0_(c0), c1_(c1) {}
    Kind kind_;
    double c0_;
    double c1_;
};

struct SolveOptions {
    double tol = 1e-10;
    int max_newton_steps = 50;
    /// Initial iterate; u ≡ 0 when empty.
    std::optional<std::vector<double>> initial_guess;
};

struct SolveResult {
    ScalarField field;
    int newton_steps = 0;
    double residual = 0.0;
};

/// Damped Newton on the Shortley–Weller discretization with exact Jacobian
/// Δ_h + diag(f'(u)). Throws NonConvergence, MaxPrincipleViolation (some
/// u <= 0 although f(0) > 0) or InadmissibleNonlinearity (affine f negative on
/// the attained range).
SolveResult solve(const std::shared_ptr<const Grid>& grid, const Nonlinearity& f, const SolveOptions& options = {});

/// Max-norm of Δ_h u + f(u) over interior nodes.
double residual(const ScalarField& field, const Nonlinearity& f);

/// Δ_h u at every interior node (Shortley–Weller, zero boundary values).
std::vector<double> discrete_laplacian(const ScalarField& field);

}  // namespace annulus_critic
