#pragma once

#include <functional>
#include <stdexcept>

#include "elbm/core.hpp"
#include "elbm/grid.hpp"
#include "elbm/kernel.hpp"
#include "elbm/material.hpp"

namespace elbm {

/// Time-derivative provider of the Dirichlet boundary value, evaluated at wall
/// intersection points and half-step times; null means a homogeneous wall.
using WallVelocityFn = std::function<Vec2(Vec2 wall_point, double t)>;

/// Periodic closure: outgoing populations re-enter on the opposite side with
/// the same link index. Together with interior streaming this realizes the
/// streaming bijection on the torus.
inline void apply_periodic(const Lattice& lat, const double* fstar, double* next) {
  if (lat.mode() != BcMode::periodic)
    throw std::logic_error("apply_periodic called on a non-periodic lattice");
  for (const WrapLink& w : lat.wrap_links()) {
    const double* src = fstar + PopulationField::slot(w.src, w.link);
    double* dst = next + PopulationField::slot(w.dst, w.link);
    for (std::size_t k = 0; k < kNumComps; ++k) dst[k] = src[k];
  }
}

/// Half-way Dirichlet closure: every missing incoming population is rebuilt
/// from its reflected outgoing partner at the same node,
/// f_ij(x, t + dt) = D f*_(-i,-j)(x, t) + S_ij(x_b, t + dt/2).
///
/// The flux-type rows of the source enter divided by the lattice speed: the
/// order-one balance of the closure is f_in - D f_out = (1/c)(i Ax + j Ay) U
/// on those rows, so only the scaled source reproduces the boundary condition
/// (and second-order convergence) for c != 1.
inline State wall_source(const Material& m, double c, int i, int j, Vec2 du_dt) {
  State s = dirichlet_source(m, i, j, du_dt);
  for (std::size_t k = 2; k < kNumComps; ++k) s[k] /= c;
  return s;
}

inline void apply_dirichlet(const Lattice& lat, const Material& m, const double* fstar,
                            double* next, double t_half, const WallVelocityFn& wall_fn) {
  if (lat.mode() != BcMode::dirichlet)
    throw std::logic_error("apply_dirichlet called on a non-dirichlet lattice");
  const double c = lat.disc().c;
  for (const BoundaryLink& bl : lat.boundary_links()) {
    if (bl.q != 0.5) throw std::logic_error("Dirichlet closure requires q = 1/2");
    const double* fs = fstar + PopulationField::slot(bl.node, bl.opp_link);
    double* dst = next + PopulationField::slot(bl.node, bl.link);
    if (wall_fn) {
      const int i = VelocitySet::ci[bl.link];
      const int j = VelocitySet::cj[bl.link];
      const State s = wall_source(m, c, i, j, wall_fn(bl.wall_point, t_half));
      for (std::size_t k = 0; k < kNumComps; ++k)
        dst[k] = kBounceSigns[k] * fs[k] + s[k];
    } else {
      for (std::size_t k = 0; k < kNumComps; ++k) dst[k] = kBounceSigns[k] * fs[k];
    }
  }
}

}  // namespace elbm
