#include "annulus_critic/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "annulus_critic/errors.hpp"

namespace annulus_critic {

namespace {

struct StencilLine {
    double minus;  // neighbor value (zero at a boundary crossing)
    double center;
    double plus;
    double h_minus;
    double h_plus;

    double first() const {
        return -h_plus / (h_minus * (h_minus + h_plus)) * minus + (h_plus - h_minus) / (h_plus * h_minus) * center +
               h_minus / (h_plus * (h_minus + h_plus)) * plus;
    }
    double second() const {
        return 2.0 * ((plus - center) / h_plus - (center - minus) / h_minus) / (h_minus + h_plus);
    }
};

StencilLine x_line(const ScalarField& f, int i, int j, const Legs& l, double h) {
    auto val = [&](int di, double leg) { return leg < 1.0 ? 0.0 : f.at(i + di, j); };
    return {val(-1, l.west), f.at(i, j), val(1, l.east), l.west * h, l.east * h};
}

StencilLine y_line(const ScalarField& f, int i, int j, const Legs& l, double h) {
    auto val = [&](int dj, double leg) { return leg < 1.0 ? 0.0 : f.at(i, j + dj); };
    return {val(-1, l.south), f.at(i, j), val(1, l.north), l.south * h, l.north * h};
}

// Value at exterior corner (ci, cj) of the cell, extrapolated linearly through
// the zero boundary crossing from an adjacent interior corner.
double ghost_value(const ScalarField& f, int ci, int cj, int other_i, int other_j) {
    const Grid& g = f.grid();
    double sum = 0.0;
    int count = 0;
    auto from_partner = [&](int pi, int pj, int di, int dj) {
        const int k = g.unknown(pi, pj);
        if (k == Grid::kExterior) return;
        const Legs& l = g.legs(static_cast<std::size_t>(k));
        double theta = di > 0 ? l.east : di < 0 ? l.west : dj > 0 ? l.north : l.south;
        theta = std::max(theta, 1e-6);
        sum += -f[static_cast<std::size_t>(k)] * (1.0 - theta) / theta;
        ++count;
    };
    from_partner(other_i, cj, ci - other_i, 0);
    from_partner(ci, other_j, 0, cj - other_j);
    if (count > 0) return sum / count;

    const int kd = g.unknown(other_i, other_j);
    if (kd != Grid::kExterior) {
        const double sd_c = signed_distance(g.domain(), g.node(ci, cj));
        const double sd_d = signed_distance(g.domain(), g.node(other_i, other_j));
        return f[static_cast<std::size_t>(kd)] * sd_c / sd_d;
    }
    return 0.0;
}

struct CellFrame {
    int i0;
    int j0;
    double s;
    double t;
};

CellFrame cell_of(const Grid& g, Vec2 p) {
    const Vec2 c = g.lattice_coords(p);
    const int i0 = std::clamp(static_cast<int>(std::floor(c.x)), 0, g.nx() - 2);
    const int j0 = std::clamp(static_cast<int>(std::floor(c.y)), 0, g.ny() - 2);
    return {i0, j0, c.x - i0, c.y - j0};
}

std::array<int, 4> corner_unknowns(const Grid& g, const CellFrame& c) {
    return {g.unknown(c.i0, c.j0), g.unknown(c.i0 + 1, c.j0), g.unknown(c.i0, c.j0 + 1),
            g.unknown(c.i0 + 1, c.j0 + 1)};
}

std::array<double, 4> bilinear_weights(double s, double t) {
    return {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
}

// Corner values of the cell, ghosts substituted for exterior corners.
std::array<double, 4> cell_values(const ScalarField& f, const CellFrame& c) {
    const Grid& g = f.grid();
    std::array<double, 4> v{};
    const int is[4] = {c.i0, c.i0 + 1, c.i0, c.i0 + 1};
    const int js[4] = {c.j0, c.j0, c.j0 + 1, c.j0 + 1};
    for (int m = 0; m < 4; ++m) {
        const int k = g.unknown(is[m], js[m]);
        if (k != Grid::kExterior) {
            v[m] = f[static_cast<std::size_t>(k)];
        } else {
            const int oi = is[m] == c.i0 ? c.i0 + 1 : c.i0;
            const int oj = js[m] == c.j0 ? c.j0 + 1 : c.j0;
            v[m] = ghost_value(f, is[m], js[m], oi, oj);
        }
    }
    return v;
}

bool block_interior(const Grid& g, int bi, int bj) {
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di)
            if (!g.interior(bi + di, bj + dj)) return false;
    return true;
}

// Lagrange biquadratic through the 3x3 block centered at node (bi, bj).
double biquadratic(const ScalarField& f, int bi, int bj, Vec2 c) {
    const double s = c.x - bi;
    const double t = c.y - bj;
    const double ws[3] = {0.5 * s * (s - 1), 1 - s * s, 0.5 * s * (s + 1)};
    const double wt[3] = {0.5 * t * (t - 1), 1 - t * t, 0.5 * t * (t + 1)};
    double acc = 0.0;
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) acc += ws[di + 1] * wt[dj + 1] * f.at(bi + di, bj + dj);
    return acc;
}

// Weighted least-squares quadratic through the interior nodes of the 4x4
// window around c and the zero-valued boundary crossings of their legs.
std::optional<double> boundary_fit(const ScalarField& f, Vec2 c) {
    const Grid& g = f.grid();
    const int i0 = static_cast<int>(std::floor(c.x));
    const int j0 = static_cast<int>(std::floor(c.y));
    std::vector<std::array<double, 3>> pts;  // lattice offsets from c, value
    for (int j = j0 - 1; j <= j0 + 2; ++j)
        for (int i = i0 - 1; i <= i0 + 2; ++i) {
            const int k = g.unknown(i, j);
            if (k == Grid::kExterior) continue;
            pts.push_back({i - c.x, j - c.y, f[static_cast<std::size_t>(k)]});
            const Legs& l = g.legs(static_cast<std::size_t>(k));
            if (l.east < 1.0) pts.push_back({i + l.east - c.x, j - c.y, 0.0});
            if (l.west < 1.0) pts.push_back({i - l.west - c.x, j - c.y, 0.0});
            if (l.north < 1.0) pts.push_back({i - c.x, j + l.north - c.y, 0.0});
            if (l.south < 1.0) pts.push_back({i - c.x, j - l.south - c.y, 0.0});
        }
    if (pts.size() < 8) return std::nullopt;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), 6);
    Eigen::VectorXd b(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t r = 0; r < pts.size(); ++r) {
        const auto [x, y, v] = pts[r];
        const double w = std::exp(-0.5 * (x * x + y * y));
        const auto row = static_cast<Eigen::Index>(r);
        a.row(row) << w, w * x, w * y, w * x * x, w * x * y, w * y * y;
        b[row] = w * v;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 6) return std::nullopt;
    return Eigen::VectorXd(qr.solve(b))[0];
}

void require_inside(const Grid& g, Vec2 p, double margin, const char* who) {
    if (!(signed_distance(g.domain(), p) < -margin))
        throw OutsideDomain(std::string(who) + ": point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                            ") is not strictly inside the domain");
}

}  // namespace

ScalarField::ScalarField(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("ScalarField: null grid");
    if (values_.size() != grid_->interior_count())
        throw std::invalid_argument("ScalarField: value count does not match interior node count");
    const Grid& g = *grid_;
    const double h = g.h();
    const std::size_t n = values_.size();
    gradient_.resize(n);
    hessian_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto [i, j] = g.lattice(k);
        const Legs& l = g.legs(k);
        const auto xl = x_line(*this, i, j, l, h);
        const auto yl = y_line(*this, i, j, l, h);
        gradient_[k] = {xl.first(), yl.first()};
        hessian_[k].xx = xl.second();
        hessian_[k].yy = yl.second();
        max_value_ = std::max(max_value_, values_[k]);
        max_abs_ = std::max(max_abs_, std::abs(values_[k]));
        max_gradient_norm_ = std::max(max_gradient_norm_, norm(gradient_[k]));
    }
    for (std::size_t k = 0; k < n; ++k) {
        const auto [i, j] = g.lattice(k);
        if (g.interior(i + 1, j + 1) && g.interior(i - 1, j + 1) && g.interior(i + 1, j - 1) &&
            g.interior(i - 1, j - 1)) {
            hessian_[k].xy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4 * h * h);
        } else if (g.interior(i + 1, j) && g.interior(i - 1, j)) {
            const auto e = static_cast<std::size_t>(g.unknown(i + 1, j));
            const auto w = static_cast<std::size_t>(g.unknown(i - 1, j));
            hessian_[k].xy = (gradient_[e].y - gradient_[w].y) / (2 * h);
        } else if (g.interior(i, j + 1) && g.interior(i, j - 1)) {
            const auto nn = static_cast<std::size_t>(g.unknown(i, j + 1));
            const auto s = static_cast<std::size_t>(g.unknown(i, j - 1));
            hessian_[k].xy = (gradient_[nn].x - gradient_[s].x) / (2 * h);
        }
    }
}

ScalarField ScalarField::from_function(std::shared_ptr<const Grid> grid, const std::function<double(Vec2)>& fn) {
    std::vector<double> v(grid->interior_count());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid->node(k));
    return ScalarField(std::move(grid), std::move(v));
}

double sample(const ScalarField& field, Vec2 p) {
    const Grid& g = field.grid();
    require_inside(g, p, 1e-12, "sample");
    const Vec2 c = g.lattice_coords(p);
    const int ic = static_cast<int>(std::lround(c.x));
    const int jc = static_cast<int>(std::lround(c.y));
    if (std::abs(c.x - ic) < 1e-12 && std::abs(c.y - jc) < 1e-12 && g.interior(ic, jc)) return field.at(ic, jc);
    // Nearest-centered block first, then blocks shifted by one node toward the interior.
    static constexpr int kShifts[9][2] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
    int best = -1;
    double best_reach = 2.0;
    for (int m = 0; m < 9; ++m) {
        const int bi = ic + kShifts[m][0], bj = jc + kShifts[m][1];
        const double reach = std::max(std::abs(c.x - bi), std::abs(c.y - bj));
        if (reach >= best_reach || reach > 1.5 || !block_interior(g, bi, bj)) continue;
        best = m;
        best_reach = reach;
        if (m == 0) break;
    }
    if (best >= 0) return biquadratic(field, ic + kShifts[best][0], jc + kShifts[best][1], c);
    if (const auto v = boundary_fit(field, c)) return *v;
    const CellFrame cf = cell_of(g, p);
    const auto v = cell_values(field, cf);
    const auto w = bilinear_weights(cf.s, cf.t);
    return w[0] * v[0] + w[1] * v[1] + w[2] * v[2] + w[3] * v[3];
}

Vec2 gradient(const ScalarField& field, Vec2 p) {
    const Grid& g = field.grid();
    require_inside(g, p, 0.0, "gradient");
    const CellFrame cf = cell_of(g, p);
    const auto ks = corner_unknowns(g, cf);
    if (std::all_of(ks.begin(), ks.end(), [](int k) { return k != Grid::kExterior; })) {
        const auto w = bilinear_weights(cf.s, cf.t);
        Vec2 acc{};
        for (int m = 0; m < 4; ++m) acc += field.nodal_gradient(static_cast<std::size_t>(ks[m])) * w[m];
        return acc;
    }
    // Partial cell: derivative of the ghosted bilinear interpolant.
    const auto v = cell_values(field, cf);
    const double h = g.h();
    const double dx = ((v[1] - v[0]) * (1 - cf.t) + (v[3] - v[2]) * cf.t) / h;
    const double dy = ((v[2] - v[0]) * (1 - cf.s) + (v[3] - v[1]) * cf.s) / h;
    return {dx, dy};
}

Sym2 hessian(const ScalarField& field, Vec2 p) {
    const Grid& g = field.grid();
    require_inside(g, p, 0.0, "hessian");
    const CellFrame cf = cell_of(g, p);
    const auto ks = corner_unknowns(g, cf);
    const auto w = bilinear_weights(cf.s, cf.t);
    Sym2 acc{};
    double wsum = 0.0;
    for (int m = 0; m < 4; ++m) {
        if (ks[m] == Grid::kExterior) continue;
        const Sym2& hk = field.nodal_hessian(static_cast<std::size_t>(ks[m]));
        acc.xx += w[m] * hk.xx;
        acc.xy += w[m] * hk.xy;
        acc.yy += w[m] * hk.yy;
        wsum += w[m];
    }
    if (wsum <= 0.0) {
        // Only exterior corners carry weight; use the unweighted interior ones.
        int count = 0;
        for (int m = 0; m < 4; ++m) {
            if (ks[m] == Grid::kExterior) continue;
            const Sym2& hk = field.nodal_hessian(static_cast<std::size_t>(ks[m]));
            acc.xx += hk.xx;
            acc.xy += hk.xy;
            acc.yy += hk.yy;
            ++count;
        }
        wsum = count > 0 ? count : 1.0;
    }
    return {acc.xx / wsum, acc.xy / wsum, acc.yy / wsum};
}

std::vector<double> directional_derivative(const ScalarField& field, Vec2 theta) {
    std::vector<double> out(field.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = dot(field.nodal_gradient(k), theta);
    return out;
}

}  // namespace annulus_critic
