#include "annulus_critic/grid.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "annulus_critic/errors.hpp"

namespace annulus_critic {

namespace {

// Fraction t in (0, 1] of the segment inside -> outside where signed distance crosses zero.
double boundary_leg(const DomainSpec& spec, Vec2 inside, Vec2 outside) {
    if (signed_distance(spec, outside) < 0.0) return 1.0;  // clipped near-boundary node
    double lo = 0.0;
    double hi = 1.0;
    const Vec2 d = outside - inside;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (signed_distance(spec, inside + d * mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct Fnv1a {
    std::uint64_t state = 1469598103934665603ULL;
    void bytes(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            state ^= p[i];
            state *= 1099511628211ULL;
        }
    }
    template <class T>
    void value(const T& v) {
        bytes(&v, sizeof(T));
    }
};

}  // namespace

std::uint64_t Grid::fingerprint() const {
    Fnv1a hash;
    hash.value(nx_);
    hash.value(ny_);
    hash.value(std::bit_cast<std::uint64_t>(h_));
    for (int k : index_) hash.value(k);
    for (const auto& l : legs_) {
        hash.value(std::bit_cast<std::uint64_t>(l.east));
        hash.value(std::bit_cast<std::uint64_t>(l.west));
        hash.value(std::bit_cast<std::uint64_t>(l.north));
        hash.value(std::bit_cast<std::uint64_t>(l.south));
    }
    return hash.state;
}

std::shared_ptr<const Grid> build_grid(const DomainSpec& spec, int n) {
    if (n < 32) throw ValidationError("build_grid: n must be >= 32, got " + std::to_string(n));
    if (const auto problems = validate(spec); !problems.empty())
        throw ValidationError("build_grid: invalid domain: " + problems.front());

    std::shared_ptr<Grid> grid(new Grid);
    Grid& g = *grid;
    g.domain_ = spec;
    g.n_ = n;

    const Vec2 half = half_extent(spec);
    const bool wide = half.x >= half.y;
    const double long_half = wide ? half.x : half.y;
    const double short_half = wide ? half.y : half.x;
    // (n - 1) h / 2 = long_half + 2h.
    g.h_ = 2.0 * long_half / (n - 5);
    int n_short = static_cast<int>(std::ceil(2.0 * short_half / g.h_ + 5.0 - 1e-9));
    if ((n_short - n) % 2 != 0) ++n_short;  // same parity keeps axes in the same lattice position
    g.nx_ = wide ? n : n_short;
    g.ny_ = wide ? n_short : n;
    g.bbox_ = {g.x(0), g.x(g.nx_ - 1), g.y(0), g.y(g.ny_ - 1)};

    const double clip = -1e-8 * g.h_;
    g.index_.assign(static_cast<std::size_t>(g.nx_) * g.ny_, Grid::kExterior);
    for (int j = 0; j < g.ny_; ++j) {
        for (int i = 0; i < g.nx_; ++i) {
            if (signed_distance(spec, g.node(i, j)) < clip) {
                g.index_[static_cast<std::size_t>(j) * g.nx_ + i] = static_cast<int>(g.lattice_of_.size());
                g.lattice_of_.push_back({i, j});
            }
        }
    }
    if (g.lattice_of_.empty())
        throw DegenerateDomain("build_grid: no interior nodes for " + std::string(spec.variant_name()) +
                               " at n=" + std::to_string(n));

    g.legs_.resize(g.lattice_of_.size());
    for (std::size_t k = 0; k < g.lattice_of_.size(); ++k) {
        const auto [i, j] = g.lattice_of_[k];
        const Vec2 p = g.node(i, j);
        auto leg = [&](int di, int dj) {
            if (g.interior(i + di, j + dj)) return 1.0;
            return boundary_leg(spec, p, g.node(i + di, j + dj));
        };
        g.legs_[k] = {leg(1, 0), leg(-1, 0), leg(0, 1), leg(0, -1)};
    }
    return grid;
}

}  // namespace annulus_critic
