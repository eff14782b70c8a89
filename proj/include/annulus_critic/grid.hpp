#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "annulus_critic/geometry.hpp"

namespace annulus_critic {

/// Fractional distances (in units of h) from a node to the next lattice node or
/// to the boundary crossing, whichever is nearer. Each lies in (0, 1].
struct Legs {
    double east = 1.0;
    double west = 1.0;
    double north = 1.0;
    double south = 1.0;

    bool full() const { return east == 1.0 && west == 1.0 && north == 1.0 && south == 1.0; }
};

struct LatticeIndex {
    int i;
    int j;
};

/// Uniform Cartesian lattice over a bounding box symmetric about both
/// coordinate axes, so reflections across x = 0 and y = 0 map nodes to nodes.
/// Node (i, j) sits at ((2i - (nx-1)) h/2, (2j - (ny-1)) h/2).
class Grid {
public:
    static constexpr int kExterior = -1;

    const DomainSpec& domain() const noexcept { return domain_; }
    int n() const noexcept { return n_; }
    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double h() const noexcept { return h_; }
    const Box& bbox() const noexcept { return bbox_; }
    std::size_t interior_count() const noexcept { return lattice_of_.size(); }

    double x(int i) const noexcept { return (2.0 * i - (nx_ - 1)) * (0.5 * h_); }
    double y(int j) const noexcept { return (2.0 * j - (ny_ - 1)) * (0.5 * h_); }
    Vec2 node(int i, int j) const noexcept { return {x(i), y(j)}; }
    Vec2 node(std::size_t k) const noexcept {
        const auto [i, j] = lattice_of_[k];
        return node(i, j);
    }

    bool in_lattice(int i, int j) const noexcept { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }
    /// Unknown index of node (i, j), or kExterior (also for out-of-lattice indices).
    int unknown(int i, int j) const noexcept {
        return in_lattice(i, j) ? index_[static_cast<std::size_t>(j) * nx_ + i] : kExterior;
    }
    bool interior(int i, int j) const noexcept { return unknown(i, j) != kExterior; }
    LatticeIndex lattice(std::size_t k) const noexcept { return lattice_of_[k]; }
    const Legs& legs(std::size_t k) const noexcept { return legs_[k]; }
    std::span<const Legs> all_legs() const noexcept { return legs_; }

    /// Continuous lattice coordinates of a point (node (i, j) maps to (i, j)).
    Vec2 lattice_coords(Vec2 p) const noexcept {
        return {p.x / h_ + 0.5 * (nx_ - 1), p.y / h_ + 0.5 * (ny_ - 1)};
    }

    /// Stable 64-bit fingerprint of the lattice layout and leg data.
    std::uint64_t fingerprint() const;

private:
    friend std::shared_ptr<const Grid> build_grid(const DomainSpec&, int);

    DomainSpec domain_;
    int n_ = 0;
    int nx_ = 0;
    int ny_ = 0;
    double h_ = 0.0;
    Box bbox_{};
    std::vector<int> index_;
    std::vector<LatticeIndex> lattice_of_;
    std::vector<Legs> legs_;
};

/// Embedded-boundary lattice with n nodes across the longer side of the
/// domain's bounding box inflated by 2h. Throws DegenerateDomain when no node
/// falls inside Ω and std::invalid_argument for n < 32 or an invalid spec.
std::shared_ptr<const Grid> build_grid(const DomainSpec& spec, int n);

}  // namespace annulus_critic
