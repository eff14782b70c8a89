#include "annulus_critic/critical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "annulus_critic/errors.hpp"

namespace annulus_critic {

namespace {

struct CellGradient {
    Vec2 g00, g10, g01, g11;

    Vec2 at(double s, double t) const {
        return g00 * ((1 - s) * (1 - t)) + g10 * (s * (1 - t)) + g01 * ((1 - s) * t) + g11 * (s * t);
    }
    Vec2 d_ds(double t) const { return (g10 - g00) * (1 - t) + (g11 - g01) * t; }
    Vec2 d_dt(double s) const { return (g01 - g00) * (1 - s) + (g11 - g10) * s; }
};

std::optional<CellGradient> cell_gradient(const ScalarField& f, int i0, int j0) {
    const Grid& g = f.grid();
    const int k00 = g.unknown(i0, j0), k10 = g.unknown(i0 + 1, j0), k01 = g.unknown(i0, j0 + 1),
              k11 = g.unknown(i0 + 1, j0 + 1);
    if (k00 < 0 || k10 < 0 || k01 < 0 || k11 < 0) return std::nullopt;
    auto G = [&](int k) { return f.nodal_gradient(static_cast<std::size_t>(k)); };
    return CellGradient{G(k00), G(k10), G(k01), G(k11)};
}

bool straddles(double a, double b, double c, double d) {
    const double lo = std::min({a, b, c, d});
    const double hi = std::max({a, b, c, d});
    return lo <= 0.0 && hi >= 0.0;
}

struct CellMinimum {
    double s, t;
    double norm;
};

// Levenberg–Marquardt on |g(s,t)|^2 restricted to the unit cell.
CellMinimum minimize_in_cell(const CellGradient& cg) {
    double s = 0.5, t = 0.5;
    Vec2 g = cg.at(s, t);
    double best = norm(g);
    double mu = 1e-12 * (dot(cg.d_ds(t), cg.d_ds(t)) + dot(cg.d_dt(s), cg.d_dt(s)));
    for (int iter = 0; iter < 60 && best > 0.0; ++iter) {
        const Vec2 js = cg.d_ds(t), jt = cg.d_dt(s);
        // Normal equations (J^T J + mu I) delta = -J^T g with J = [js jt].
        const double a11 = dot(js, js) + mu, a12 = dot(js, jt), a22 = dot(jt, jt) + mu;
        const double b1 = -dot(js, g), b2 = -dot(jt, g);
        const double det = a11 * a22 - a12 * a12;
        if (!(std::abs(det) > 0.0)) break;
        const double ds = (b1 * a22 - b2 * a12) / det;
        const double dt = (a11 * b2 - a12 * b1) / det;
        const double ns = std::clamp(s + ds, 0.0, 1.0), nt = std::clamp(t + dt, 0.0, 1.0);
        const Vec2 ng = cg.at(ns, nt);
        const double nn = norm(ng);
        if (nn < best) {
            const double moved = std::hypot(ns - s, nt - t);
            s = ns;
            t = nt;
            g = ng;
            best = nn;
            mu *= 0.3;
            if (moved < 1e-15) break;
        } else {
            mu = std::max(mu * 10.0, 1e-30);
            if (mu > 1e30) break;
        }
    }
    return {s, t, best};
}

// Newton on the global blended gradient field starting from p.
std::optional<Vec2> polish(const ScalarField& f, Vec2 p, double tol) {
    const Grid& g = f.grid();
    for (int iter = 0; iter < 30; ++iter) {
        if (!contains(g.domain(), p)) return std::nullopt;
        const Vec2 gp = gradient(f, p);
        if (norm(gp) < tol) return p;
        const Vec2 lc = g.lattice_coords(p);
        const int i0 = std::clamp(static_cast<int>(std::floor(lc.x)), 0, g.nx() - 2);
        const int j0 = std::clamp(static_cast<int>(std::floor(lc.y)), 0, g.ny() - 2);
        const auto cg = cell_gradient(f, i0, j0);
        if (!cg) return std::nullopt;
        const double s = lc.x - i0, t = lc.y - j0;
        const Vec2 js = cg->d_ds(t) / g.h(), jt = cg->d_dt(s) / g.h();
        const double det = js.x * jt.y - jt.x * js.y;
        if (!(std::abs(det) > 0.0)) return std::nullopt;
        const Vec2 step{-(jt.y * gp.x - jt.x * gp.y) / det, -(-js.y * gp.x + js.x * gp.y) / det};
        p += step;
    }
    return norm(gradient(f, p)) < tol ? std::optional<Vec2>(p) : std::nullopt;
}

// Single-linkage grouping by distance < radius; returns group id per point.
std::vector<int> link_groups(const std::vector<Vec2>& pts, double radius) {
    std::vector<int> parent(pts.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
            if (distance(pts[a], pts[b]) < radius) parent[static_cast<std::size_t>(find(static_cast<int>(b)))] = find(static_cast<int>(a));
    std::vector<int> ids(pts.size());
    for (std::size_t a = 0; a < pts.size(); ++a) ids[a] = find(static_cast<int>(a));
    return ids;
}

std::optional<CriticalRing> detect_ring(const std::vector<Vec2>& near, Vec2 center, double h,
                                        const DetectionOptions& opt) {
    if (static_cast<int>(near.size()) <= opt.ring_min_samples) return std::nullopt;
    struct Polar {
        double angle, radius;
        Vec2 p;
    };
    std::vector<Polar> polar;
    polar.reserve(near.size());
    for (const Vec2& p : near) {
        const Vec2 d = p - center;
        polar.push_back({std::atan2(d.y, d.x), norm(d), p});
    }
    std::sort(polar.begin(), polar.end(), [](const Polar& a, const Polar& b) { return a.angle < b.angle; });
    const double max_gap = opt.ring_gap_h * h;
    for (std::size_t k = 0; k < polar.size(); ++k) {
        const auto& next = polar[(k + 1) % polar.size()];
        if (distance(polar[k].p, next.p) >= max_gap) return std::nullopt;
    }
    double rmin = polar.front().radius, rmax = rmin, rsum = 0.0;
    for (const auto& q : polar) {
        rmin = std::min(rmin, q.radius);
        rmax = std::max(rmax, q.radius);
        rsum += q.radius;
    }
    if (rmax - rmin >= max_gap) return std::nullopt;
    return CriticalRing{center, rsum / static_cast<double>(polar.size()), rmax - rmin, static_cast<int>(polar.size())};
}

}  // namespace

std::string_view to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::Maximum: return "maximum";
        case CriticalKind::Saddle: return "saddle";
        case CriticalKind::Degenerate: return "degenerate";
    }
    return "degenerate";
}

double CriticalSet::max_cluster_diameter() const {
    double d = 0.0;
    for (const auto& c : clusters) d = std::max(d, c.diameter);
    return d;
}

double hessian_threshold(const ScalarField& field) {
    const double gap = min_boundary_gap(field.grid().domain());
    return 1e-6 * field.max_abs() / (gap * gap);
}

Classification classify(const ScalarField& field, Vec2 p) { return classify(field, p, hessian_threshold(field)); }

Classification classify(const ScalarField& field, Vec2 p, double tau_h) {
    const Sym2 hs = hessian(field, p);
    const double mean = 0.5 * (hs.xx + hs.yy);
    const double rad = std::hypot(0.5 * (hs.xx - hs.yy), hs.xy);
    Classification c;
    c.hessian_eigs = {mean - rad, mean + rad};
    const auto [l1, l2] = c.hessian_eigs;
    if (l2 < -tau_h)
        c.kind = CriticalKind::Maximum;
    else if (l1 < -tau_h && l2 > tau_h)
        c.kind = CriticalKind::Saddle;
    else
        c.kind = CriticalKind::Degenerate;
    return c;
}

CriticalSet find_critical_points(const ScalarField& field, const DetectionOptions& opt) {
    const Grid& g = field.grid();
    const DomainSpec& spec = g.domain();
    const double h = g.h();
    CriticalSet out;
    out.grad_tol = opt.grad_tol_rel * field.max_gradient_norm();
    out.near_tol = opt.near_tol_rel * field.max_gradient_norm();
    if (field.max_gradient_norm() == 0.0) return out;

    const auto corners = corner_points(spec);
    auto near_corner = [&](Vec2 p) {
        return std::any_of(corners.begin(), corners.end(),
                           [&](Vec2 c) { return distance(p, c) < opt.corner_guard_h * h; });
    };

    std::vector<Vec2> roots;
    for (int j0 = 0; j0 + 1 < g.ny(); ++j0) {
        for (int i0 = 0; i0 + 1 < g.nx(); ++i0) {
            const auto cg = cell_gradient(field, i0, j0);
            if (!cg) continue;
            if (!straddles(cg->g00.x, cg->g10.x, cg->g01.x, cg->g11.x) ||
                !straddles(cg->g00.y, cg->g10.y, cg->g01.y, cg->g11.y))
                continue;
            ++out.candidate_cells;
            const CellMinimum m = minimize_in_cell(*cg);
            const Vec2 p = g.node(i0, j0) + Vec2{m.s, m.t} * h;
            if (near_corner(p)) continue;
            if (m.norm < out.near_tol) out.near_critical.push_back(p);
            if (m.norm < out.grad_tol) roots.push_back(p);
        }
    }

    // Near-critical clusters.
    {
        const auto ids = link_groups(out.near_critical, opt.merge_radius_h * h);
        std::vector<int> uniq(ids);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (int id : uniq) {
            NearCriticalCluster c;
            std::vector<Vec2> members;
            for (std::size_t a = 0; a < ids.size(); ++a)
                if (ids[a] == id) members.push_back(out.near_critical[a]);
            Vec2 sum{};
            for (const Vec2& q : members) sum += q;
            c.centroid = sum / static_cast<double>(members.size());
            c.size = static_cast<int>(members.size());
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b)
                    c.diameter = std::max(c.diameter, distance(members[a], members[b]));
            out.clusters.push_back(c);
        }
    }

    out.ring = detect_ring(out.near_critical, inner_center(spec), h, opt);
    if (out.ring) return out;

    const auto axes = symmetry_axes(spec).axes;
    const auto ids = link_groups(roots, opt.merge_radius_h * h);
    std::vector<int> uniq(ids);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    const double tau_h = hessian_threshold(field);
    for (int id : uniq) {
        Vec2 sum{};
        int count = 0;
        Vec2 best = roots.front();
        double best_norm = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < ids.size(); ++a) {
            if (ids[a] != id) continue;
            sum += roots[a];
            ++count;
            const double gn = norm(gradient(field, roots[a]));
            if (gn < best_norm) {
                best_norm = gn;
                best = roots[a];
            }
        }
        const Vec2 centroid = sum / static_cast<double>(count);
        Vec2 loc = best;
        if (const auto polished = polish(field, centroid, out.grad_tol);
            polished && distance(*polished, centroid) < opt.merge_radius_h * h)
            loc = *polished;
        CriticalPoint cp;
        cp.location = loc;
        cp.grad_norm = norm(gradient(field, loc));
        const auto cls = classify(field, loc, tau_h);
        cp.kind = cls.kind;
        cp.hessian_eigs = cls.hessian_eigs;
        cp.merged = count;
        double best_axis = opt.axis_tol_h * h;
        for (const auto& ax : axes) {
            const double d = distance_to_line(loc, ax.anchor, ax.direction);
            if (d < best_axis) {
                best_axis = d;
                cp.axis = ax.name;
                cp.axis_coordinate = dot(loc - ax.anchor, ax.direction);
            }
        }
        out.points.push_back(std::move(cp));
    }
    std::sort(out.points.begin(), out.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return a.location.x != b.location.x ? a.location.x < b.location.x : a.location.y < b.location.y;
    });
    return out;
}

int AxisCounts::count(std::string_view axis) const {
    for (const auto& c : per_axis)
        if (c.axis == axis) return c.count;
    return 0;
}

AxisCounts count_by_axis(const std::vector<CriticalPoint>& points, const std::vector<SymmetryAxis>& axes,
                         double tau_d) {
    AxisCounts out;
    for (const auto& ax : axes) out.per_axis.push_back({ax.name, 0});
    for (const auto& p : points) {
        int best = -1;
        double best_d = tau_d;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const double d = distance_to_line(p.location, axes[a].anchor, axes[a].direction);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(a);
            }
        }
        if (best < 0)
            ++out.off_axis;
        else
            ++out.per_axis[static_cast<std::size_t>(best)].count;
    }
    return out;
}

MorseBalance morse_balance(const std::vector<CriticalPoint>& points) {
    MorseBalance m;
    for (const auto& p : points) {
        switch (p.kind) {
            case CriticalKind::Maximum: ++m.n_max; break;
            case CriticalKind::Saddle: ++m.n_saddle; break;
            case CriticalKind::Degenerate: ++m.n_degenerate; break;
        }
    }
    m.balanced = m.n_max == m.n_saddle && m.n_degenerate == 0;
    return m;
}

}  // namespace annulus_critic
