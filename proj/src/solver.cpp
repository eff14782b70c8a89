#include "annulus_critic/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "annulus_critic/errors.hpp"

namespace annulus_critic {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using VectorX = Eigen::VectorXd;

SparseMatrix assemble_laplacian(const Grid& g) {
    const double h = g.h();
    const auto n = static_cast<Eigen::Index>(g.interior_count());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 5);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto [i, j] = g.lattice(static_cast<std::size_t>(k));
        const Legs& l = g.legs(static_cast<std::size_t>(k));
        const double he = l.east * h, hw = l.west * h, hn = l.north * h, hs = l.south * h;
        triplets.emplace_back(k, k, -2.0 / (he * hw) - 2.0 / (hn * hs));
        auto link = [&](int di, int dj, double leg, double coef) {
            if (leg < 1.0) return;
            const int m = g.unknown(i + di, j + dj);
            if (m != Grid::kExterior) triplets.emplace_back(k, m, coef);
        };
        link(1, 0, l.east, 2.0 / (he * (he + hw)));
        link(-1, 0, l.west, 2.0 / (hw * (he + hw)));
        link(0, 1, l.north, 2.0 / (hn * (hn + hs)));
        link(0, -1, l.south, 2.0 / (hs * (hn + hs)));
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    return a;
}

VectorX nonlinear_residual(const SparseMatrix& lap, const VectorX& u, const Nonlinearity& f) {
    VectorX r = lap * u;
    for (Eigen::Index k = 0; k < r.size(); ++k) r[k] += f.value(u[k]);
    return r;
}

}  // namespace

Nonlinearity Nonlinearity::constant(double c) {
    if (!(std::isfinite(c) && c >= 0.0)) throw ValidationError("Constant nonlinearity requires c >= 0");
    return {Kind::Constant, c, 0.0};
}

Nonlinearity Nonlinearity::affine_decreasing(double c0, double c1) {
    if (!(std::isfinite(c0) && std::isfinite(c1) && c0 > 0.0 && c1 >= 0.0))
        throw ValidationError("AffineDecreasing nonlinearity requires c0 > 0 and c1 >= 0");
    return {Kind::AffineDecreasing, c0, c1};
}

Nonlinearity Nonlinearity::exp_decreasing(double c0, double c1) {
    if (!(std::isfinite(c0) && std::isfinite(c1) && c0 > 0.0 && c1 >= 0.0))
        throw ValidationError("ExpDecreasing nonlinearity requires c0 > 0 and c1 >= 0");
    return {Kind::ExpDecreasing, c0, c1};
}

std::string_view Nonlinearity::kind_name() const noexcept {
    switch (kind_) {
        case Kind::Constant: return "Constant";
        case Kind::AffineDecreasing: return "AffineDecreasing";
        case Kind::ExpDecreasing: return "ExpDecreasing";
    }
    return "Constant";
}

double Nonlinearity::value(double u) const noexcept {
    switch (kind_) {
        case Kind::Constant: return c0_;
        case Kind::AffineDecreasing: return c0_ - c1_ * u;
        case Kind::ExpDecreasing: return c0_ * std::exp(-c1_ * u);
    }
    return 0.0;
}

double Nonlinearity::derivative(double u) const noexcept {
    switch (kind_) {
        case Kind::Constant: return 0.0;
        case Kind::AffineDecreasing: return -c1_;
        case Kind::ExpDecreasing: return -c1_ * c0_ * std::exp(-c1_ * u);
    }
    return 0.0;
}

std::vector<double> discrete_laplacian(const ScalarField& field) {
    const SparseMatrix lap = assemble_laplacian(field.grid());
    const Eigen::Map<const VectorX> u(field.values().data(), static_cast<Eigen::Index>(field.size()));
    const VectorX r = lap * u;
    return {r.data(), r.data() + r.size()};
}

double residual(const ScalarField& field, const Nonlinearity& f) {
    const auto lap = discrete_laplacian(field);
    double worst = 0.0;
    for (std::size_t k = 0; k < lap.size(); ++k) worst = std::max(worst, std::abs(lap[k] + f.value(field[k])));
    return worst;
}

SolveResult solve(const std::shared_ptr<const Grid>& grid, const Nonlinearity& f, const SolveOptions& options) {
    if (!(options.tol > 0.0)) throw std::invalid_argument("solve: tol must be > 0");
    const Grid& g = *grid;
    const auto n = static_cast<Eigen::Index>(g.interior_count());
    const SparseMatrix lap = assemble_laplacian(g);

    VectorX u = VectorX::Zero(n);
    if (options.initial_guess) {
        if (static_cast<Eigen::Index>(options.initial_guess->size()) != n)
            throw std::invalid_argument("solve: initial guess has wrong length");
        u = Eigen::Map<const VectorX>(options.initial_guess->data(), n);
    }

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(lap);
    bool factored = false;

    VectorX res = nonlinear_residual(lap, u, f);
    double rnorm = res.lpNorm<Eigen::Infinity>();
    int steps = 0;
    while (rnorm > options.tol) {
        if (steps >= options.max_newton_steps)
            throw NonConvergence("solve: no convergence after " + std::to_string(steps) +
                                     " Newton steps, residual " + std::to_string(rnorm),
                                 rnorm, steps);
        if (!factored || !f.derivative_is_zero()) {
            SparseMatrix jac = lap;
            if (!f.derivative_is_zero())
                for (Eigen::Index k = 0; k < n; ++k) jac.coeffRef(k, k) += f.derivative(u[k]);
            lu.factorize(jac);
            if (lu.info() != Eigen::Success) throw NonConvergence("solve: Jacobian factorization failed", rnorm, steps);
            factored = true;
        }
        const VectorX delta = lu.solve(-res);
        double alpha = 1.0;
        VectorX trial;
        VectorX trial_res;
        double trial_norm = 0.0;
        bool improved = false;
        for (int halving = 0; halving < 20; ++halving, alpha *= 0.5) {
            trial = u + alpha * delta;
            trial_res = nonlinear_residual(lap, trial, f);
            trial_norm = trial_res.lpNorm<Eigen::Infinity>();
            if (trial_norm < rnorm) {
                improved = true;
                break;
            }
        }
        ++steps;
        if (!improved)
            throw NonConvergence("solve: line search stalled at residual " + std::to_string(rnorm), rnorm, steps);
        u = std::move(trial);
        res = std::move(trial_res);
        rnorm = trial_norm;
    }

    std::vector<double> values(u.data(), u.data() + u.size());
    if (f.value(0.0) > 0.0) {
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (!(values[k] > 0.0)) {
                const Vec2 p = g.node(k);
                throw MaxPrincipleViolation("solve: nonpositive value " + std::to_string(values[k]) + " at node (" +
                                            std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
            }
        }
    }
    ScalarField field(grid, std::move(values));
    if (f.kind() == Nonlinearity::Kind::AffineDecreasing && f.value(field.max_value()) < 0.0)
        throw InadmissibleNonlinearity("solve: affine nonlinearity becomes negative on the attained range (max u = " +
                                       std::to_string(field.max_value()) + ")");
    return {std::move(field), steps, rnorm};
}

}  // namespace annulus_critic
