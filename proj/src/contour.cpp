#include "annulus_critic/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include "annulus_critic/errors.hpp"

namespace annulus_critic {

namespace {

struct Segment {
    long long edge[2];
};

}  // namespace

std::vector<Polyline> marching_squares(const Grid& g, std::span<const double> nodal, double level) {
    if (nodal.size() != g.interior_count()) throw std::invalid_argument("marching_squares: nodal size mismatch");
    const int nx = g.nx();
    auto hid = [&](int i, int j) { return 2LL * (static_cast<long long>(j) * nx + i); };
    auto vid = [&](int i, int j) { return 2LL * (static_cast<long long>(j) * nx + i) + 1; };

    std::unordered_map<long long, Vec2> crossing;
    std::vector<Segment> segments;

    for (int j = 0; j + 1 < g.ny(); ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const int ci[4] = {i, i + 1, i + 1, i};
            const int cj[4] = {j, j, j + 1, j + 1};
            double v[4];
            bool ok = true;
            for (int m = 0; m < 4 && ok; ++m) {
                const int k = g.unknown(ci[m], cj[m]);
                ok = k != Grid::kExterior;
                if (ok) v[m] = nodal[static_cast<std::size_t>(k)];
            }
            if (!ok) continue;
            bool in[4];
            for (int m = 0; m < 4; ++m) in[m] = v[m] >= level;
            // Edge m joins corners m and (m+1)%4 (bottom, right, top, left).
            const long long ids[4] = {hid(i, j), vid(i + 1, j), hid(i, j + 1), vid(i, j)};
            int crossed[4];
            int nc = 0;
            for (int m = 0; m < 4; ++m) {
                const int a = m, b = (m + 1) % 4;
                if (in[a] == in[b]) continue;
                crossed[nc++] = m;
                if (!crossing.contains(ids[m])) {
                    const double t = (level - v[a]) / (v[b] - v[a]);
                    const Vec2 pa = g.node(ci[a], cj[a]), pb = g.node(ci[b], cj[b]);
                    crossing.emplace(ids[m], pa + (pb - pa) * t);
                }
            }
            if (nc == 2) {
                segments.push_back({{ids[crossed[0]], ids[crossed[1]]}});
            } else if (nc == 4) {
                const bool center_in = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= level;
                if (center_in == in[0]) {
                    // Corners 0 and 2 connect through the center; cut off corners 1 and 3.
                    segments.push_back({{ids[0], ids[1]}});
                    segments.push_back({{ids[2], ids[3]}});
                } else {
                    segments.push_back({{ids[3], ids[0]}});
                    segments.push_back({{ids[1], ids[2]}});
                }
            }
        }
    }

    std::unordered_map<long long, std::vector<std::size_t>> by_edge;
    for (std::size_t s = 0; s < segments.size(); ++s)
        for (long long e : segments[s].edge) by_edge[e].push_back(s);

    std::vector<bool> used(segments.size(), false);
    std::vector<Polyline> out;
    auto walk = [&](std::size_t start, long long start_edge) {
        Polyline pl;
        pl.points.push_back(crossing.at(start_edge));
        std::size_t s = start;
        long long from = start_edge;
        while (true) {
            used[s] = true;
            const long long to = segments[s].edge[0] == from ? segments[s].edge[1] : segments[s].edge[0];
            if (to == start_edge) {
                pl.closed = true;
                break;
            }
            pl.points.push_back(crossing.at(to));
            std::size_t next = segments.size();
            for (std::size_t cand : by_edge[to])
                if (!used[cand]) next = cand;
            if (next == segments.size()) break;
            s = next;
            from = to;
        }
        if (pl.closed) {
            double area2 = 0.0;
            for (std::size_t k = 0; k < pl.points.size(); ++k)
                area2 += cross(pl.points[k], pl.points[(k + 1) % pl.points.size()]);
            if (area2 < 0.0) std::reverse(pl.points.begin(), pl.points.end());
        }
        out.push_back(std::move(pl));
    };
    // Open chains start at edges touched by a single segment.
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        for (long long e : segments[s].edge) {
            if (!used[s] && by_edge[e].size() == 1) walk(s, e);
        }
    }
    for (std::size_t s = 0; s < segments.size(); ++s)
        if (!used[s]) walk(s, segments[s].edge[0]);
    return out;
}

std::string_view to_string(CurveEnd e) {
    switch (e) {
        case CurveEnd::Inner: return "inner";
        case CurveEnd::Outer: return "outer";
        case CurveEnd::Closed: return "closed";
    }
    return "closed";
}

std::vector<NodalCurve> nodal_set(const ScalarField& field, Vec2 theta) {
    const auto u_theta = directional_derivative(field, theta);
    const DomainSpec& spec = field.grid().domain();
    std::vector<NodalCurve> out;
    for (auto& pl : marching_squares(field.grid(), u_theta, 0.0)) {
        NodalCurve c;
        c.direction = theta;
        if (!pl.closed) {
            const Vec2 ends[2] = {pl.points.front(), pl.points.back()};
            for (int e = 0; e < 2; ++e) {
                const auto d = boundary_distances(spec, ends[e]);
                c.endpoint_boundaries[static_cast<std::size_t>(e)] = d.inner <= d.outer ? CurveEnd::Inner : CurveEnd::Outer;
                c.endpoint_gaps[static_cast<std::size_t>(e)] = std::min(d.inner, d.outer);
            }
        }
        c.polyline = std::move(pl.points);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<LevelSet> level_sets(const ScalarField& field, std::span<const double> levels) {
    std::vector<LevelSet> out;
    for (double level : levels) {
        if (!(level > 0.0 && level < field.max_value()))
            throw LevelOutOfRange("level_sets: level " + std::to_string(level) + " outside (0, " +
                                  std::to_string(field.max_value()) + ")");
        out.push_back({level, marching_squares(field.grid(), field.values(), level)});
    }
    return out;
}

int winding_number(const std::vector<Vec2>& poly, Vec2 p) {
    double total = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Vec2 a = poly[k] - p;
        const Vec2 b = poly[(k + 1) % poly.size()] - p;
        total += std::atan2(cross(a, b), dot(a, b));
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

bool crosses_vertical(const DomainSpec& spec, const std::vector<Vec2>& poly, double x0, double clearance) {
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
        const Vec2 a = poly[k], b = poly[k + 1];
        if ((a.x - x0) * (b.x - x0) >= 0.0) continue;
        const double t = (x0 - a.x) / (b.x - a.x);
        const Vec2 q = a + (b - a) * t;
        if (-signed_distance(spec, q) > clearance) return true;
    }
    return false;
}

int level_branch_count(const ScalarField& field, Vec2 p, double radius, int samples) {
    const double base = sample(field, p);
    int changes = 0;
    double first = 0.0, prev = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double t = 2.0 * std::numbers::pi * s / samples;
        const double d = sample(field, p + Vec2{std::cos(t), std::sin(t)} * radius) - base;
        if (s == 0)
            first = d;
        else if ((d >= 0.0) != (prev >= 0.0))
            ++changes;
        prev = d;
    }
    if ((first >= 0.0) != (prev >= 0.0)) ++changes;
    return changes;
}

}  // namespace annulus_critic
