#pragma once

#include <functional>
#include <stdexcept>

#include "elbm/core.hpp"
#include "elbm/grid.hpp"
#include "elbm/kernel.hpp"
#include "elbm/material.hpp"

namespace elbm {

/// Everything the second-order initialization needs at one node. The spatial
/// derivatives of the initial state come from closed-form providers, not from
/// finite differences.
struct NodeInit {
  Vec2 u0;      // initial displacement
  State U0;     // initial state vector
  State dxU0;   // x-derivative of the initial state
  State dyU0;   // y-derivative of the initial state
  State B0;     // body load at t = 0
};

using InitDataFn = std::function<NodeInit(double x, double y)>;

/// Second-order consistent population at one node and link: the equilibrium of
/// the initial state plus the dt-correction built from the body load and the
/// spatial state derivatives through nested flux applications.
inline State init_population(const Material& m, double c, double dt, int i, int j,
                             const NodeInit& d, bool second_order) {
  const double tc = 2.0 / c;
  const State fxU = flux_x(m, d.U0);
  const State fyU = flux_y(m, d.U0);
  State f;
  for (std::size_t k = 0; k < kNumComps; ++k)
    f[k] = 0.25 * (d.U0[k] + tc * (i * fxU[k] + j * fyU[k]));
  if (!second_order) return f;

  const State fxB = flux_x(m, d.B0);
  const State fyB = flux_y(m, d.B0);
  const State fx_dx = flux_x(m, d.dxU0);
  const State fy_dy = flux_y(m, d.dyU0);
  const State fx_fx_dx = flux_x(m, fx_dx);
  const State fy_fx_dx = flux_y(m, fx_dx);
  const State fx_fy_dy = flux_x(m, fy_dy);
  const State fy_fy_dy = flux_y(m, fy_dy);

  const double cx = (2.0 * i * i - 1.0) / c;
  const double cy = (2.0 * j * j - 1.0) / c;
  const double cc = 2.0 / (c * c);
  for (std::size_t k = 0; k < kNumComps; ++k) {
    const double bracket_b = d.B0[k] + tc * (i * fxB[k] + j * fyB[k]);
    const double bracket_x =
        c * (i * d.dxU0[k] + cx * fx_dx[k] - cc * (i * fx_fx_dx[k] + j * fy_fx_dx[k]));
    const double bracket_y =
        c * (j * d.dyU0[k] + cy * fy_dy[k] - cc * (i * fx_fy_dy[k] + j * fy_fy_dy[k]));
    f[k] -= dt / 8.0 * (bracket_b + bracket_x + bracket_y);
  }
  return f;
}

/// Fills the population buffer at t = 0 for every node of the lattice.
/// `second_order = false` drops the dt-correction bracket; that mode exists
/// only to let tests demonstrate the loss of second-order convergence.
inline void init_populations(const Lattice& lat, const Material& m,
                             const InitDataFn& data, double* f_out,
                             bool second_order = true) {
  if (!data) throw std::invalid_argument("init_populations: missing data provider");
  const double c = lat.disc().c;
  const double dt = lat.disc().dt;
  for (std::size_t node = 0; node < lat.num_nodes(); ++node) {
    const Vec2 p = lat.node_pos(node);
    const NodeInit d = data(p.x, p.y);
    for (std::size_t q = 0; q < kNumLinks; ++q) {
      const State f = init_population(m, c, dt, VelocitySet::ci[q],
                                      VelocitySet::cj[q], d, second_order);
      double* dst = f_out + PopulationField::slot(node, q);
      for (std::size_t k = 0; k < kNumComps; ++k) dst[k] = f[k];
    }
  }
}

}  // namespace elbm
