#include "annulus_critic/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "annulus_critic/errors.hpp"

namespace annulus_critic {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double circle_signed_distance(Vec2 center, double radius, Vec2 p) { return distance(p, center) - radius; }

double polygon_inradius(int k, double rho) { return rho * std::cos(kPi / k); }

std::vector<Vec2> polygon_vertices(int k, double rho) {
    std::vector<Vec2> v;
    v.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        const double t = 2.0 * kPi * j / k;
        v.emplace_back(rho * std::cos(t), rho * std::sin(t));
    }
    return v;
}

std::vector<Vec2> sample_circle(Vec2 c, double r, int n) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n;
        pts.emplace_back(c.x + r * std::cos(t), c.y + r * std::sin(t));
    }
    return pts;
}

// Equal arc-length samples via an inverted cumulative-length table.
std::vector<Vec2> sample_ellipse(double a, double b, int n) {
    if (a == b) return sample_circle({0, 0}, a, n);
    constexpr int kTable = 1 << 14;
    std::vector<double> cum(kTable + 1, 0.0);
    auto speed = [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
    const double dt = 2.0 * kPi / kTable;
    for (int i = 0; i < kTable; ++i) {
        const double t0 = i * dt;
        // Simpson on each table interval.
        cum[i + 1] = cum[i] + dt / 6.0 * (speed(t0) + 4.0 * speed(t0 + 0.5 * dt) + speed(t0 + dt));
    }
    const double perimeter = cum.back();
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double s = perimeter * k / n;
        auto it = std::upper_bound(cum.begin(), cum.end(), s);
        const auto i = static_cast<int>(std::clamp<std::ptrdiff_t>(it - cum.begin() - 1, 0, kTable - 1));
        // Newton polish on arc length starting from the table bracket.
        double t = i * dt + (s - cum[i]) / (cum[i + 1] - cum[i]) * dt;
        for (int iter = 0; iter < 3; ++iter) {
            const double t0 = i * dt;
            const double m = 0.5 * (t0 + t);
            const double len = cum[i] + (t - t0) / 6.0 * (speed(t0) + 4.0 * speed(m) + speed(t));
            t -= (len - s) / speed(t);
        }
        pts.emplace_back(a * std::cos(t), b * std::sin(t));
    }
    return pts;
}

std::vector<Vec2> sample_polygon(int k, double rho, int n) {
    const auto verts = polygon_vertices(k, rho);
    const int per_edge = (n + k - 1) / k;
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(per_edge * k));
    for (int j = 0; j < k; ++j) {
        const Vec2 a = verts[static_cast<std::size_t>(j)];
        const Vec2 b = verts[static_cast<std::size_t>((j + 1) % k)];
        pts.push_back(a);
        for (int m = 1; m < per_edge; ++m) pts.push_back(a + (b - a) * (static_cast<double>(m) / per_edge));
    }
    return pts;
}

// Signed distances to the outer and inner filled regions.
struct TwoSided {
    double outer;
    double inner;
};

TwoSided two_sided(const DomainSpec& spec, Vec2 p) {
    return std::visit(
        overloaded{
            [&](const ConcentricAnnulus& d) -> TwoSided {
                return {circle_signed_distance({0, 0}, d.R0, p), circle_signed_distance({0, 0}, d.r0, p)};
            },
            [&](const EccentricAnnulus& d) -> TwoSided {
                return {circle_signed_distance({0, 0}, d.R, p), circle_signed_distance({d.a, 0}, d.r, p)};
            },
            [&](const PetalEllipse& d) -> TwoSided {
                return {detail::ellipse_signed_distance(d.b1, d.b2, p), circle_signed_distance({0, 0}, d.a_in, p)};
            },
            [&](const PetalPolygon& d) -> TwoSided {
                return {detail::regular_polygon_signed_distance(d.k, d.rho, p),
                        circle_signed_distance({0, 0}, d.a_in, p)};
            },
            [&](const ScaledEllipseAnnulus& d) -> TwoSided {
                return {detail::ellipse_signed_distance(d.b1, d.b2, p),
                        detail::ellipse_signed_distance(d.s * d.b1, d.s * d.b2, p)};
            },
        },
        spec.shape());
}

}  // namespace

namespace detail {

double ellipse_signed_distance(double a, double b, Vec2 p) {
    const double x = std::abs(p.x);
    const double y = std::abs(p.y);
    const double level = (x / a) * (x / a) + (y / b) * (y / b);
    const double sign = level < 1.0 ? -1.0 : 1.0;
    if (a == b) return std::hypot(x, y) - a;

    auto dist_at = [&](double t) { return std::hypot(a * std::cos(t) - x, b * std::sin(t) - y); };
    // Stationarity of |E(t) - p|^2 on the first-quadrant arc.
    auto f = [&](double t) {
        return (b * b - a * a) * std::sin(t) * std::cos(t) + a * x * std::sin(t) - b * y * std::cos(t);
    };
    auto df = [&](double t) {
        return (b * b - a * a) * std::cos(2.0 * t) + a * x * std::cos(t) + b * y * std::sin(t);
    };

    double best = std::min(dist_at(0.0), dist_at(0.5 * kPi));
    const double guesses[] = {std::atan2(a * y, b * x), 0.25 * kPi, 1e-3, 0.5 * kPi - 1e-3};
    for (double t : guesses) {
        double ft = f(t);
        for (int iter = 0; iter < 50; ++iter) {
            const double d = df(t);
            if (d == 0.0) break;
            double step = -ft / d;
            double next = std::clamp(t + step, 0.0, 0.5 * kPi);
            double fn = f(next);
            int halvings = 0;
            while (std::abs(fn) > std::abs(ft) && halvings < 30) {
                step *= 0.5;
                next = std::clamp(t + step, 0.0, 0.5 * kPi);
                fn = f(next);
                ++halvings;
            }
            const double moved = std::abs(next - t);
            t = next;
            ft = fn;
            if (moved < 1e-12 * 0.5 * kPi || ft == 0.0) break;
        }
        best = std::min(best, dist_at(t));
    }
    return sign * best;
}

double regular_polygon_signed_distance(int k, double rho, Vec2 p) {
    const auto verts = polygon_vertices(k, rho);
    double dmin = std::numeric_limits<double>::infinity();
    bool inside = true;
    for (int j = 0; j < k; ++j) {
        const Vec2 a = verts[static_cast<std::size_t>(j)];
        const Vec2 b = verts[static_cast<std::size_t>((j + 1) % k)];
        const Vec2 e = b - a;
        const double t = std::clamp(dot(p - a, e) / dot(e, e), 0.0, 1.0);
        dmin = std::min(dmin, distance(p, a + e * t));
        if (cross(e, p - a) <= 0.0) inside = false;
    }
    return inside ? -dmin : dmin;
}

}  // namespace detail

std::string_view DomainSpec::variant_name() const {
    return std::visit(overloaded{
                          [](const ConcentricAnnulus&) { return std::string_view{"ConcentricAnnulus"}; },
                          [](const EccentricAnnulus&) { return std::string_view{"EccentricAnnulus"}; },
                          [](const PetalEllipse&) { return std::string_view{"PetalEllipse"}; },
                          [](const PetalPolygon&) { return std::string_view{"PetalPolygon"}; },
                          [](const ScaledEllipseAnnulus&) { return std::string_view{"ScaledEllipseAnnulus"}; },
                      },
                      shape_);
}

std::string_view to_string(AxisClass c) {
    switch (c) {
        case AxisClass::Long: return "long";
        case AxisClass::Short: return "short";
        case AxisClass::Other: return "other";
    }
    return "other";
}

double Box::margin(Vec2 p) const { return std::min({p.x - xlo, xhi - p.x, p.y - ylo, yhi - p.y}); }

double ExclusionRegion::margin(Vec2 p) const {
    const double d = distance(p, annulus_center);
    double ring;
    if (d > r_hi) {
        ring = d - r_hi;
    } else if (d > r_lo) {
        ring = -std::min(d - r_lo, r_hi - d);
    } else {
        ring = d - r_lo;  // inside the hole, not part of Ω anyway
    }
    return std::min(allowed_box.margin(p), ring);
}

std::vector<std::string> validate(const DomainSpec& spec) {
    std::vector<std::string> out;
    auto need = [&](bool ok, const char* msg) {
        if (!ok) out.emplace_back(msg);
    };
    auto finite = [](std::initializer_list<double> values) {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    };
    std::visit(overloaded{
                   [&](const ConcentricAnnulus& d) {
                       need(finite({d.r0, d.R0}), "parameters must be finite");
                       need(d.r0 > 0.0 && d.r0 < d.R0, "0<r0<R0 violated");
                   },
                   [&](const EccentricAnnulus& d) {
                       need(finite({d.a, d.r, d.R}), "parameters must be finite");
                       need(d.a > 0.0, "a>0 violated");
                       need(d.r > 0.0, "r>0 violated");
                       need(d.a + d.r < d.R, "a+r<R violated");
                   },
                   [&](const PetalEllipse& d) {
                       need(finite({d.a_in, d.b1, d.b2}), "parameters must be finite");
                       need(d.b1 > 0.0 && d.b2 > 0.0, "b1>0 and b2>0 violated");
                       need(d.a_in > 0.0 && d.a_in < std::min(d.b1, d.b2), "0<a_in<min(b1,b2) violated");
                   },
                   [&](const PetalPolygon& d) {
                       need(finite({d.a_in, d.rho}), "parameters must be finite");
                       need(d.k >= 3, "k>=3 violated");
                       need(d.rho > 0.0, "rho>0 violated");
                       if (d.k >= 3)
                           need(d.a_in > 0.0 && d.a_in < polygon_inradius(d.k, d.rho),
                                "0<a_in<inradius violated");
                   },
                   [&](const ScaledEllipseAnnulus& d) {
                       need(finite({d.b1, d.b2, d.s}), "parameters must be finite");
                       need(d.b1 > 0.0 && d.b2 > 0.0, "b1>0 and b2>0 violated");
                       need(d.s > 0.0 && d.s < 1.0, "0<s<1 violated");
                   },
               },
               spec.shape());
    return out;
}

double signed_distance(const DomainSpec& spec, Vec2 p) {
    const auto d = two_sided(spec, p);
    return std::max(d.outer, -d.inner);
}

bool contains(const DomainSpec& spec, Vec2 p) { return signed_distance(spec, p) < 0.0; }

BoundaryDistances boundary_distances(const DomainSpec& spec, Vec2 p) {
    const auto d = two_sided(spec, p);
    return {std::abs(d.inner), std::abs(d.outer)};
}

SymmetryAxes symmetry_axes(const DomainSpec& spec) {
    const Vec2 origin{0, 0};
    auto pair_axes = [&](double bx, double by) {
        const AxisClass xc = bx > by ? AxisClass::Long : bx < by ? AxisClass::Short : AxisClass::Other;
        const AxisClass yc = bx > by ? AxisClass::Short : bx < by ? AxisClass::Long : AxisClass::Other;
        return SymmetryAxes{{{{1, 0}, origin, xc, "x"}, {{0, 1}, origin, yc, "y"}}, false};
    };
    return std::visit(
        overloaded{
            [&](const ConcentricAnnulus&) {
                return SymmetryAxes{
                    {{{1, 0}, origin, AxisClass::Other, "x"}, {{0, 1}, origin, AxisClass::Other, "y"}}, true};
            },
            [&](const EccentricAnnulus&) { return SymmetryAxes{{{{1, 0}, origin, AxisClass::Long, "x"}}, false}; },
            [&](const PetalEllipse& d) { return pair_axes(d.b1, d.b2); },
            [&](const ScaledEllipseAnnulus& d) { return pair_axes(d.b1, d.b2); },
            [&](const PetalPolygon& d) {
                SymmetryAxes out;
                const bool odd = d.k % 2 == 1;
                for (int j = 0; j < d.k; ++j) {
                    // Odd k: every axis runs through a vertex, so use the vertex rays.
                    const double t = odd ? 2.0 * kPi * j / d.k : kPi * j / d.k;
                    AxisClass c = AxisClass::Other;
                    if (!odd) c = j % 2 == 0 ? AxisClass::Long : AxisClass::Short;
                    SymmetryAxis ax{{std::cos(t), std::sin(t)}, origin, c, "axis" + std::to_string(j)};
                    if (j == 0) ax.name = "x";
                    if (!odd && 2 * j == d.k) {
                        ax.direction = {0, 1};
                        ax.name = "y";
                    }
                    out.axes.push_back(std::move(ax));
                }
                return out;
            },
        },
        spec.shape());
}

ExclusionRegion exclusion_region(const DomainSpec& spec) {
    if (spec.is<PetalEllipse>()) {
        const auto& d = spec.as<PetalEllipse>();
        const double c = std::min(d.b1, d.b2);
        const double hx = (d.a_in + d.b1) / 2.0;
        const double hy = (d.a_in + d.b2) / 2.0;
        return {{-hx, hx, -hy, hy}, {0, 0}, d.a_in, std::sqrt(d.a_in * c)};
    }
    if (spec.is<EccentricAnnulus>()) {
        const auto& d = spec.as<EccentricAnnulus>();
        return {{(-d.R + d.a - d.r) / 2.0, (d.a + d.r + d.R) / 2.0, -d.R, d.R},
                {d.a, 0},
                d.r,
                std::sqrt(d.r * (d.R - d.a))};
    }
    throw UnsupportedVariant("exclusion_region: no exclusion bounds for " + std::string(spec.variant_name()));
}

BoundaryPolylines boundary_polylines(const DomainSpec& spec, int n) {
    if (n < 3) throw std::invalid_argument("boundary_polylines: n must be >= 3");
    return std::visit(overloaded{
                          [&](const ConcentricAnnulus& d) {
                              return BoundaryPolylines{sample_circle({0, 0}, d.r0, n), sample_circle({0, 0}, d.R0, n)};
                          },
                          [&](const EccentricAnnulus& d) {
                              return BoundaryPolylines{sample_circle({d.a, 0}, d.r, n), sample_circle({0, 0}, d.R, n)};
                          },
                          [&](const PetalEllipse& d) {
                              return BoundaryPolylines{sample_circle({0, 0}, d.a_in, n), sample_ellipse(d.b1, d.b2, n)};
                          },
                          [&](const PetalPolygon& d) {
                              return BoundaryPolylines{sample_circle({0, 0}, d.a_in, n), sample_polygon(d.k, d.rho, n)};
                          },
                          [&](const ScaledEllipseAnnulus& d) {
                              return BoundaryPolylines{sample_ellipse(d.s * d.b1, d.s * d.b2, n),
                                                       sample_ellipse(d.b1, d.b2, n)};
                          },
                      },
                      spec.shape());
}

Vec2 inner_center(const DomainSpec& spec) {
    if (spec.is<EccentricAnnulus>()) return {spec.as<EccentricAnnulus>().a, 0.0};
    return {0.0, 0.0};
}

Vec2 half_extent(const DomainSpec& spec) {
    return std::visit(overloaded{
                          [](const ConcentricAnnulus& d) { return Vec2{d.R0, d.R0}; },
                          [](const EccentricAnnulus& d) { return Vec2{d.R, d.R}; },
                          [](const PetalEllipse& d) { return Vec2{d.b1, d.b2}; },
                          [](const PetalPolygon& d) {
                              double ymax = 0.0;
                              for (const auto& v : polygon_vertices(d.k, d.rho)) ymax = std::max(ymax, std::abs(v.y));
                              return Vec2{d.rho, ymax};
                          },
                          [](const ScaledEllipseAnnulus& d) { return Vec2{d.b1, d.b2}; },
                      },
                      spec.shape());
}

double min_boundary_gap(const DomainSpec& spec) {
    return std::visit(overloaded{
                          [](const ConcentricAnnulus& d) { return d.R0 - d.r0; },
                          [](const EccentricAnnulus& d) { return d.R - d.a - d.r; },
                          [](const PetalEllipse& d) { return std::min(d.b1, d.b2) - d.a_in; },
                          [](const PetalPolygon& d) { return polygon_inradius(d.k, d.rho) - d.a_in; },
                          [](const ScaledEllipseAnnulus& d) { return (1.0 - d.s) * std::min(d.b1, d.b2); },
                      },
                      spec.shape());
}

std::vector<Vec2> corner_points(const DomainSpec& spec) {
    if (spec.is<PetalPolygon>()) {
        const auto& d = spec.as<PetalPolygon>();
        return polygon_vertices(d.k, d.rho);
    }
    return {};
}

}  // namespace annulus_critic
