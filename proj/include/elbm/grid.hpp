#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "elbm/core.hpp"

namespace elbm {

/// D2Q4 velocity index set in the canonical order (1,0),(0,1),(-1,0),(0,-1).
/// All population storage and all assembled 20x20 matrices use this order.
struct VelocitySet {
  static constexpr std::array<int, kNumLinks> ci{1, 0, -1, 0};
  static constexpr std::array<int, kNumLinks> cj{0, 1, 0, -1};
  static constexpr std::array<std::size_t, kNumLinks> opposite{2, 3, 0, 1};
};

enum class BcMode { periodic, dirichlet };

inline std::string to_string(BcMode m) {
  return m == BcMode::periodic ? "periodic" : "dirichlet";
}

inline BcMode bc_mode_from_string(const std::string& s) {
  if (s == "periodic") return BcMode::periodic;
  if (s == "dirichlet") return BcMode::dirichlet;
  throw std::invalid_argument("unknown bc mode: " + s);
}

/// Dimensionless space/time discretization. c = dx/dt is the lattice speed and
/// stays constant under acoustic-scaling refinement.
struct Discretization {
  double dx = 0.0;
  double dt = 0.0;
  double c = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  Vec2 x0;
  double t_final = 0.0;

  void validate() const {
    if (dx <= 0.0 || dt <= 0.0 || t_final <= 0.0)
      throw std::invalid_argument("dx, dt, t_final must be positive");
    if (nx < 2 || ny < 2) throw std::invalid_argument("nx, ny must be >= 2");
    if (std::abs(c - dx / dt) > 1e-15 * std::abs(c))
      throw std::invalid_argument("c must equal dx/dt");
  }
};

/// One missing incoming population slot at a boundary node: link (i,j) in D_x,
/// its reflected partner, the wall intersection point and wall distance q.
struct BoundaryLink {
  std::uint32_t node = 0;
  std::uint8_t link = 0;      // index into VelocitySet, member of D_x
  std::uint8_t opp_link = 0;  // reflected outgoing partner (-i,-j)
  Vec2 wall_point;
  double q = 0.5;
};

/// One periodic wrap connection: the outgoing population at `src` re-enters at
/// `dst` with the same link index.
struct WrapLink {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint8_t link = 0;
};

/// Rectangular lattice: topology, node classification and boundary-link
/// geometry. Immutable after construction; safe for shared read access.
class Lattice {
 public:
  Lattice(Discretization d, BcMode mode, Vec2 extent)
      : disc_(d), mode_(mode), extent_(extent) {
    disc_.validate();
    build();
  }

  const Discretization& disc() const { return disc_; }
  BcMode mode() const { return mode_; }
  Vec2 extent() const { return extent_; }
  std::size_t nx() const { return disc_.nx; }
  std::size_t ny() const { return disc_.ny; }
  std::size_t num_nodes() const { return disc_.nx * disc_.ny; }

  // row-major, x fastest
  std::size_t node_index(std::size_t k, std::size_t l) const { return l * disc_.nx + k; }
  std::size_t node_k(std::size_t n) const { return n % disc_.nx; }
  std::size_t node_l(std::size_t n) const { return n / disc_.nx; }
  Vec2 node_pos(std::size_t n) const {
    return {disc_.x0.x + static_cast<double>(node_k(n)) * disc_.dx,
            disc_.x0.y + static_cast<double>(node_l(n)) * disc_.dx};
  }

  bool is_boundary(std::size_t n) const { return !missing_links(n).empty(); }

  /// D_x of a node: indices of missing incoming populations (empty on interior
  /// nodes and everywhere on periodic lattices).
  std::vector<std::size_t> missing_links(std::size_t n) const {
    std::vector<std::size_t> r;
    for (std::size_t q = 0; q < kNumLinks; ++q)
      if (stream_source(n, q) == kOffLattice) r.push_back(q);
    return r;
  }

  /// Streaming target of (node, link), i.e. the node at x + c_ij dt.
  /// kOffLattice if the target leaves the domain (dirichlet) or crosses the
  /// periodic seam (handled by the wrap list).
  std::int64_t stream_target(std::size_t n, std::size_t link) const {
    return target_[link * num_nodes() + n];
  }

  /// Inverse neighbor map: the node whose link-`link` population streams into
  /// (node, link); kOffLattice if none exists.
  std::int64_t stream_source(std::size_t n, std::size_t link) const {
    return source_[link * num_nodes() + n];
  }

  const std::vector<WrapLink>& wrap_links() const { return wrap_links_; }
  const std::vector<BoundaryLink>& boundary_links() const { return boundary_links_; }
  std::size_t num_boundary_nodes() const { return num_boundary_nodes_; }

  /// Wall intersection point of the boundary-crossing lattice link at a
  /// boundary node. Accepts the link labelled either by the missing incoming
  /// index (i,j) in D_x or by the outgoing partner (-i,-j); both identify the
  /// same undirected link and the same wall point.
  Vec2 wall_point(std::size_t n, std::size_t link) const {
    for (const auto& bl : boundary_links_) {
      if (bl.node == n && (bl.link == link || bl.opp_link == link)) return bl.wall_point;
    }
    throw std::invalid_argument("wall_point: interior node or non-crossing link");
  }

  static constexpr std::int64_t kOffLattice = -1;

 private:
  void build() {
    const std::size_t n = num_nodes();
    target_.assign(kNumLinks * n, kOffLattice);
    source_.assign(kNumLinks * n, kOffLattice);
    const std::int64_t nx = static_cast<std::int64_t>(disc_.nx);
    const std::int64_t ny = static_cast<std::int64_t>(disc_.ny);
    std::vector<std::uint8_t> is_bnd(n, 0);

    for (std::int64_t l = 0; l < ny; ++l)
      for (std::int64_t k = 0; k < nx; ++k) {
        const std::size_t node = static_cast<std::size_t>(l * nx + k);
        for (std::size_t q = 0; q < kNumLinks; ++q) {
          const std::int64_t tk = k + VelocitySet::ci[q];
          const std::int64_t tl = l + VelocitySet::cj[q];
          const bool inside = tk >= 0 && tk < nx && tl >= 0 && tl < ny;
          if (inside) {
            const std::size_t tgt = static_cast<std::size_t>(tl * nx + tk);
            target_[q * n + node] = static_cast<std::int64_t>(tgt);
            source_[q * n + tgt] = static_cast<std::int64_t>(node);
          } else if (mode_ == BcMode::periodic) {
            const std::size_t tgt = static_cast<std::size_t>(
                ((tl + ny) % ny) * nx + ((tk + nx) % nx));
            source_[q * n + tgt] = static_cast<std::int64_t>(node);
            wrap_links_.push_back({static_cast<std::uint32_t>(node),
                                   static_cast<std::uint32_t>(tgt),
                                   static_cast<std::uint8_t>(q)});
          } else {
            // Missing incoming population at this node: its link crosses the
            // wall half a spacing behind the node.
            const std::size_t miss = VelocitySet::opposite[q];
            const Vec2 pos = node_pos(node);
            const Vec2 wall{pos.x - VelocitySet::ci[miss] * disc_.dx / 2.0,
                            pos.y - VelocitySet::cj[miss] * disc_.dx / 2.0};
            boundary_links_.push_back({static_cast<std::uint32_t>(node),
                                       static_cast<std::uint8_t>(miss),
                                       static_cast<std::uint8_t>(q), wall, 0.5});
            is_bnd[node] = 1;
          }
        }
      }
    for (auto b : is_bnd) num_boundary_nodes_ += b;
  }

  Discretization disc_;
  BcMode mode_;
  Vec2 extent_;
  std::vector<std::int64_t> target_;
  std::vector<std::int64_t> source_;
  std::vector<WrapLink> wrap_links_;
  std::vector<BoundaryLink> boundary_links_;
  std::size_t num_boundary_nodes_ = 0;
};

/// Builds the lattice for a rectangular domain (0,Lx) x (0,Ly). The extents
/// must be divisible by dx (relative tolerance 1e-12). Dirichlet mode offsets
/// the lattice by dx/2 so every boundary-crossing link has wall distance 1/2;
/// periodic mode places nodes at multiples of dx.
inline Lattice build_lattice(Vec2 extent, double dx, double dt, BcMode mode,
                             double t_final) {
  if (dx <= 0.0 || dt <= 0.0)
    throw std::invalid_argument("dx and dt must be positive");
  auto count = [dx](double len, const char* axis) {
    const double ratio = len / dx;
    const double rounded = std::round(ratio);
    if (rounded < 2.0 || std::abs(ratio - rounded) > 1e-12 * ratio)
      throw std::invalid_argument(std::string("extent not divisible by dx along ") + axis);
    return static_cast<std::size_t>(rounded);
  };
  Discretization d;
  d.dx = dx;
  d.dt = dt;
  d.c = dx / dt;
  d.nx = count(extent.x, "x");
  d.ny = count(extent.y, "y");
  d.x0 = mode == BcMode::dirichlet ? Vec2{dx / 2.0, dx / 2.0} : Vec2{0.0, 0.0};
  d.t_final = t_final;
  return Lattice(d, mode, extent);
}

}  // namespace elbm
