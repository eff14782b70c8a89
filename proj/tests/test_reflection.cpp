#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "annulus_critic/errors.hpp"
#include "annulus_critic/reflection.hpp"
#include "support.hpp"

using namespace annulus_critic;
using test_support::critical_of;
using test_support::example1;
using test_support::example2;
using test_support::solved;

namespace {

constexpr int kN = 192;

const ScalarField& field_of(const DomainSpec& spec) { return solved(spec, kN).field; }

}  // namespace

TEST(PlaneDifference, Example2InnerCenterLine) {
    const auto r = plane_difference(field_of(example2()), ReflectionLine::at_offset({1.0, 0.0}, 0.3));
    EXPECT_LT(r.max_diff, 0.0);
    EXPECT_EQ(r.violations, 0);
    EXPECT_GT(r.n_pairs, 100);
    EXPECT_FALSE(r.flagged);
}

TEST(PlaneDifference, Example1SweepStart) {
    const auto r = plane_difference(field_of(example1()), ReflectionLine::at_offset({1.0, 0.0}, 3.5));
    EXPECT_LT(r.max_diff, 0.0);
    EXPECT_EQ(r.violations, 0);
    EXPECT_TRUE(r.normal_derivative_consistent);
}

TEST(PlaneDifference, SymmetryAxisGivesZero) {
    for (const auto& [spec, normal] : {std::pair{example2(), Vec2{0.0, 1.0}}, std::pair{example1(), Vec2{1.0, 0.0}},
                                       std::pair{example1(), Vec2{0.0, -1.0}}}) {
        const auto& u = field_of(spec);
        const auto r = plane_difference(u, ReflectionLine::at_offset(normal, 0.0));
        EXPECT_LE(std::abs(r.min_diff), 1e-9 * u.max_abs());
        EXPECT_LE(std::abs(r.max_diff), 1e-9 * u.max_abs());
        EXPECT_EQ(r.violations, 0);
    }
}

TEST(PlaneDifference, NoPairsBeyondDomain) {
    EXPECT_THROW(plane_difference(field_of(example2()), ReflectionLine::at_offset({1.0, 0.0}, 0.9)), EmptyRegion);
}

TEST(SphereDifference, InsidePredictedRanges) {
    const auto r1 = sphere_difference(field_of(example1()), {0.0, 0.0}, 1.5);
    EXPECT_LT(r1.max_diff, 0.0);
    EXPECT_EQ(r1.violations, 0);
    const auto r2 = sphere_difference(field_of(example2()), {0.3, 0.0}, 0.28);
    EXPECT_LT(r2.max_diff, 0.0);
    EXPECT_EQ(r2.violations, 0);
    EXPECT_EQ(r2.images_outside, 0);
}

TEST(SphereDifference, InnerRadiusIsEmpty) {
    EXPECT_THROW(sphere_difference(field_of(example2()), {0.3, 0.0}, 0.2), EmptyRegion);
    EXPECT_THROW(sphere_difference(field_of(example1()), {0.0, 0.0}, 1.0), EmptyRegion);
}

TEST(SphereDifference, FarBeyondLimitThrows) {
    EXPECT_THROW(sphere_difference(field_of(example2()), {0.3, 0.0}, 0.6), InvertedPointOutside);
}

TEST(SphereDifference, NonCircularInnerBoundary) {
    const auto& u = solved(ScaledEllipseAnnulus{3.0, 2.0, 0.4}, 64).field;
    EXPECT_THROW(inner_radius(u.grid().domain()), UnsupportedVariant);
    EXPECT_THROW(sphere_difference(u, {0.0, 0.0}, 1.0), UnsupportedVariant);
}

TEST(SweepPlane, PredictedIntervalsAreViolationFree) {
    const auto s1 = sweep_plane(field_of(example1()), {1.0, 0.0}, {3.5, 6.0, true, false}, 20);
    ASSERT_EQ(s1.reports.size(), 20u);
    for (const auto& r : s1.reports) EXPECT_EQ(r.violations, 0) << r.lambda;
    EXPECT_FALSE(s1.first_violation);
    const auto s2 = sweep_plane(field_of(example2()), {1.0, 0.0}, {0.65, 0.8, true, false}, 10);
    for (const auto& r : s2.reports) EXPECT_EQ(r.violations, 0) << r.lambda;
    EXPECT_FALSE(s2.first_violation);
}

TEST(SweepPlane, ReportsInLambdaOrder) {
    const auto s = sweep_plane(field_of(example1()), {0.0, 1.0}, {2.5, 4.0, true, false}, 12);
    for (std::size_t k = 1; k < s.reports.size(); ++k) EXPECT_LT(s.reports[k - 1].lambda, s.reports[k].lambda);
    EXPECT_DOUBLE_EQ(s.reports.front().lambda, 2.5);
    EXPECT_LT(s.reports.back().lambda, 4.0);
}

TEST(SweepPlane, ZeroWidthRangeGivesIdenticalReports) {
    const auto s = sweep_plane(field_of(example2()), {1.0, 0.0}, {0.7, 0.7, true, true}, 2);
    ASSERT_EQ(s.reports.size(), 2u);
    EXPECT_EQ(s.reports[0].lambda, s.reports[1].lambda);
    EXPECT_EQ(s.reports[0].min_diff, s.reports[1].min_diff);
    EXPECT_EQ(s.reports[0].max_diff, s.reports[1].max_diff);
    EXPECT_EQ(s.reports[0].n_pairs, s.reports[1].n_pairs);
    EXPECT_EQ(s.reports[0].violations, s.reports[1].violations);
}

TEST(SweepPlane, TooFewSteps) {
    EXPECT_THROW(sweep_plane(field_of(example2()), {1.0, 0.0}, {0.65, 0.8}, 1), std::invalid_argument);
}

TEST(SweepPlane, PastTheCriticalPointViolates) {
    // Lines left of the Example 2 saddle put it inside Σ, where w must change sign.
    const auto s = sweep_plane(field_of(example2()), {1.0, 0.0}, {0.3, 0.8, true, false}, 40);
    ASSERT_TRUE(s.first_violation);
    EXPECT_LT(*s.first_violation, 0.65);
}

TEST(LambdaRange, OpenAndClosedEnds) {
    const auto closed = LambdaRange{0.0, 1.0, true, true}.samples(5);
    EXPECT_DOUBLE_EQ(closed.front(), 0.0);
    EXPECT_DOUBLE_EQ(closed.back(), 1.0);
    const auto open_lo = LambdaRange{0.0, 1.0, false, true}.samples(4);
    EXPECT_GT(open_lo.front(), 0.0);
    EXPECT_DOUBLE_EQ(open_lo.back(), 1.0);
    const auto open_hi = LambdaRange{0.0, 1.0, true, false}.samples(4);
    EXPECT_DOUBLE_EQ(open_hi.front(), 0.0);
    EXPECT_LT(open_hi.back(), 1.0);
    const auto open = LambdaRange{0.0, 1.0, false, false}.samples(3);
    EXPECT_GT(open.front(), 0.0);
    EXPECT_LT(open.back(), 1.0);
    EXPECT_THROW(LambdaRange{}.samples(1), std::invalid_argument);
}

TEST(SweepSphere, PredictedIntervalsAreViolationFree) {
    const auto s1 = sweep_sphere(field_of(example1()), {1.0, 2.0, false, true}, 20);
    for (const auto& r : s1.reports) {
        EXPECT_EQ(r.violations, 0) << r.lambda;
        EXPECT_FALSE(r.limit_exceeded) << r.lambda;
    }
    EXPECT_FALSE(s1.limit_exceeded);
    const auto s2 = sweep_sphere(field_of(example2()), {0.2, std::sqrt(0.1), false, true}, 10);
    for (const auto& r : s2.reports) {
        EXPECT_EQ(r.violations, 0) << r.lambda;
        EXPECT_FALSE(r.limit_exceeded) << r.lambda;
    }
}

TEST(SweepSphere, BeyondInversionBoundIsFlagged) {
    for (const auto& [spec, limit] : {std::pair{example1(), 2.0}, std::pair{example2(), std::sqrt(0.1)}}) {
        const auto s = sweep_sphere(field_of(spec), {limit, 1.2 * limit, false, true}, 10);
        bool flagged = s.limit_exceeded;
        for (const auto& r : s.reports) flagged = flagged || r.flagged;
        EXPECT_TRUE(flagged) << spec.variant_name();
    }
}

TEST(ReflectionProperties, Antisymmetry) {
    std::mt19937 rng(7);
    const auto& u = field_of(example2());
    const auto line = ReflectionLine::at_offset({1.0, 0.0}, 0.7);
    int checked = 0;
    while (checked < 100) {
        const Vec2 p = test_support::random_interior(example2(), rng, 1e-3);
        if (!(line.offset(p) > 0.0)) continue;
        const Vec2 m = line.mirror(p);
        if (!(signed_distance(example2(), m) < -1e-3)) continue;
        EXPECT_NEAR(reflection_difference(u, line, p), -reflection_difference(u, line, m), 1e-12 * u.max_abs());
        ++checked;
    }
}

TEST(ReflectionProperties, ZeroOnTheLine) {
    const auto& u = field_of(example1());
    const double h = u.grid().h();
    const auto ux = directional_derivative(u, {1.0, 0.0});
    const auto uy = directional_derivative(u, {0.0, 1.0});
    double max_grad = 0.0;
    for (std::size_t k = 0; k < ux.size(); ++k) max_grad = std::max(max_grad, std::hypot(ux[k], uy[k]));
    for (double lambda : {3.5, 4.0, 5.0}) {
        const auto line = ReflectionLine::at_offset({1.0, 0.0}, lambda);
        for (double y = -1.5; y <= 1.5; y += 0.1) {
            const Vec2 on{lambda, y};
            if (!(signed_distance(example1(), on) < -h)) continue;
            EXPECT_LE(std::abs(reflection_difference(u, line, on)), 1e-8 * u.max_abs());
            // Within h/2 of T the difference is bounded by the reflected distance times the gradient.
            const Vec2 near{lambda + 0.4 * h, y};
            EXPECT_LE(std::abs(reflection_difference(u, line, near)), 0.8 * h * max_grad * 1.05);
        }
    }
}

TEST(ReflectionProperties, CleanSweepsExcludeCriticalPoints) {
    struct Case {
        DomainSpec spec;
        Vec2 normal;
        LambdaRange range;
    };
    const Case cases[] = {{example2(), {1.0, 0.0}, {0.65, 0.8, true, false}},
                          {example2(), {-1.0, 0.0}, {0.35, 0.8, true, false}},
                          {example1(), {1.0, 0.0}, {3.5, 6.0, true, false}},
                          {example1(), {0.0, 1.0}, {2.5, 4.0, true, false}},
                          {example1(), {0.0, -1.0}, {2.5, 4.0, true, false}}};
    for (const auto& c : cases) {
        const auto s = sweep_plane(field_of(c.spec), c.normal, c.range, 20);
        bool clean = !s.first_violation;
        for (const auto& r : s.reports) clean = clean && r.normal_derivative_consistent;
        ASSERT_TRUE(clean) << c.spec.variant_name();
        for (const auto& p : critical_of(c.spec, kN).points)
            EXPECT_LT(dot(p.location, c.normal), c.range.lo) << c.spec.variant_name();
    }
}
