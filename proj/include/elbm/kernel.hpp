#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "elbm/core.hpp"
#include "elbm/grid.hpp"
#include "elbm/material.hpp"
#include "elbm/parallel.hpp"

namespace elbm {

/// Double-buffered population storage: per node 4 links x 5 components,
/// node-major (node * 20 + link * 5 + comp). The buffer swap is the only
/// mutation crossing time steps.
class PopulationField {
 public:
  explicit PopulationField(std::size_t nodes) : nodes_(nodes) {
    buf_[0].assign(nodes * kStatePerNode, 0.0);
    buf_[1].assign(nodes * kStatePerNode, 0.0);
  }

  std::size_t nodes() const { return nodes_; }
  double* current() { return buf_[cur_].data(); }
  const double* current() const { return buf_[cur_].data(); }
  double* next() { return buf_[1 - cur_].data(); }
  void swap_buffers() { cur_ = 1 - cur_; }

  static std::size_t slot(std::size_t node, std::size_t link) {
    return node * kStatePerNode + link * kNumComps;
  }

 private:
  std::size_t nodes_;
  std::vector<double> buf_[2];
  int cur_ = 0;
};

/// Zeroth moment of the populations at one node plus the half-step body-load
/// contribution: U = f_10 + f_01 + f_-10 + f_0-1 + (dt/2) B, summed in the
/// canonical link order.
inline State moments_at(const double* node_f, const State& body, double dt) {
  State u;
  for (std::size_t k = 0; k < kNumComps; ++k)
    u[k] = ((node_f[0 * kNumComps + k] + node_f[1 * kNumComps + k]) +
            node_f[2 * kNumComps + k]) +
           node_f[3 * kNumComps + k];
  const double half_dt = 0.5 * dt;
  for (std::size_t k = 0; k < kNumComps; ++k) u[k] += half_dt * body[k];
  return u;
}

/// Equilibrium population for link (i,j):
/// f_eq = 1/4 [U + (2/c)(i flux_x(U) + j flux_y(U))].
inline State equilibrium(const Material& m, const State& u, int i, int j, double c) {
  const State fx = flux_x(m, u);
  const State fy = flux_y(m, u);
  const double tc = 2.0 / c;
  State r;
  for (std::size_t k = 0; k < kNumComps; ++k)
    r[k] = 0.25 * (u[k] + tc * (i * fx[k] + j * fy[k]));
  return r;
}

/// BGK collision at one node, in place: f* = omega f_eq(U) + (1 - omega) f.
/// The forcing term dt (2 - omega) W B of the full collision rule is omitted;
/// it vanishes at the supported omega = 2 and the weights W are left
/// undefined otherwise.
inline void collide_node(const Material& m, double c, double omega, const State& u,
                         double* node_f) {
  const State fx = flux_x(m, u);
  const State fy = flux_y(m, u);
  const double tc = 2.0 / c;
  const double keep = 1.0 - omega;
  for (std::size_t q = 0; q < kNumLinks; ++q) {
    const int i = VelocitySet::ci[q];
    const int j = VelocitySet::cj[q];
    double* f = node_f + q * kNumComps;
    for (std::size_t k = 0; k < kNumComps; ++k) {
      const double feq = 0.25 * (u[k] + tc * (i * fx[k] + j * fy[k]));
      f[k] = omega * feq + keep * f[k];
    }
  }
}

/// Streaming of all links whose target node exists: pushes the post-collision
/// populations into the next buffer. Boundary-crossing links are left to the
/// periodic or Dirichlet closure.
inline void stream_interior(const Lattice& lat, const double* fstar, double* next,
                            WorkerPool& pool) {
  const std::size_t n = lat.num_nodes();
  pool.for_tiles(n, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t node = b; node < e; ++node)
      for (std::size_t q = 0; q < kNumLinks; ++q) {
        const std::int64_t tgt = lat.stream_target(node, q);
        if (tgt == Lattice::kOffLattice) continue;
        const double* src = fstar + PopulationField::slot(node, q);
        double* dst = next + PopulationField::slot(static_cast<std::size_t>(tgt), q);
        for (std::size_t k = 0; k < kNumComps; ++k) dst[k] = src[k];
      }
  });
}

}  // namespace elbm
