#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <string>

#include "annulus_critic/critical.hpp"
#include "annulus_critic/experiment.hpp"
#include "annulus_critic/solver.hpp"

namespace test_support {

using namespace annulus_critic;

/// Closed-form solution of Δu + c = 0 between concentric circles r0 < ρ < R0.
struct RadialSolution {
    double r0, R0, c = 1.0;

    double A() const { return c * (R0 * R0 - r0 * r0) / (4.0 * std::log(R0 / r0)); }
    double B() const { return c * r0 * r0 / 4.0 - A() * std::log(r0); }
    double operator()(double rho) const { return -c * rho * rho / 4.0 + A() * std::log(rho) + B(); }
    double operator()(Vec2 p) const { return (*this)(norm(p)); }
    double critical_radius() const { return std::sqrt(2.0 * A() / c); }
};

inline const DomainSpec& example1() {
    static const DomainSpec s = PetalEllipse{1.0, 6.0, 4.0};
    return s;
}

inline const DomainSpec& example2() {
    static const DomainSpec s = EccentricAnnulus{0.3, 0.2, 0.8};
    return s;
}

inline std::string key_of(const DomainSpec& spec, int n, const Nonlinearity& f) {
    return domain_json(spec).dump() + "/" + std::to_string(n) + "/" + nonlinearity_json(f).dump();
}

/// Solves once per (domain, n, f) for the lifetime of the test binary.
inline const SolveResult& solved(const DomainSpec& spec, int n, const Nonlinearity& f = Nonlinearity::constant(1.0)) {
    static std::mutex mu;
    static std::map<std::string, SolveResult> cache;
    const std::lock_guard lock(mu);
    const auto key = key_of(spec, n, f);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, solve(build_grid(spec, n), f)).first;
    return it->second;
}

inline const CriticalSet& critical_of(const DomainSpec& spec, int n) {
    static std::mutex mu;
    static std::map<std::string, CriticalSet> cache;
    const auto& sol = solved(spec, n);
    const std::lock_guard lock(mu);
    const auto key = key_of(spec, n, Nonlinearity::constant(1.0));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, find_critical_points(sol.field)).first;
    return it->second;
}

/// One representative of each domain variant, sized for desk-scale grids.
inline std::vector<std::pair<std::string, DomainSpec>> all_variants() {
    return {{"Concentric", ConcentricAnnulus{1.0, 2.0}},
            {"Eccentric", EccentricAnnulus{0.3, 0.2, 0.8}},
            {"PetalEllipse", PetalEllipse{1.0, 6.0, 4.0}},
            {"PetalPolygon", PetalPolygon{0.5, 4, 2.0}},
            {"ScaledEllipse", ScaledEllipseAnnulus{3.0, 2.0, 0.4}}};
}

/// Uniform random point of the bounding box of the domain that lies in Ω.
inline Vec2 random_interior(const DomainSpec& spec, std::mt19937& rng, double clearance = 0.0) {
    const Vec2 half = half_extent(spec);
    std::uniform_real_distribution<double> ux(-half.x, half.x), uy(-half.y, half.y);
    while (true) {
        const Vec2 p{ux(rng), uy(rng)};
        if (signed_distance(spec, p) < -clearance) return p;
    }
}

}  // namespace test_support
