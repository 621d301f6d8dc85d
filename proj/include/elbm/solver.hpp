#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "elbm/boundary.hpp"
#include "elbm/core.hpp"
#include "elbm/grid.hpp"
#include "elbm/initcond.hpp"
#include "elbm/kernel.hpp"
#include "elbm/material.hpp"
#include "elbm/parallel.hpp"
#include "elbm/stabmon.hpp"

namespace elbm {

/// Fills the first two components of the body load for every node (row-major
/// node order) at time t; null means zero body load.
using BodySliceFn = std::function<void(double t, std::span<Vec2> out)>;

/// One time step, fixed phase order:
///   (1a) moments  (1b) trapezoidal displacement update + stress
///   (1c) equilibria  (1d) collision
///   (2a) interior streaming  (2b) boundary closure  (2c) u* accumulator.
/// A Solver::step() call rotates this cycle: it performs (1c)-(2c) for the
/// current time level, swaps buffers once, then performs (1a)-(1b) of the new
/// level, so that populations, state and derived fields are all consistent at
/// time() after every call.
class Solver {
 public:
  Solver(const Lattice& lat, const Material& mat, double omega, WorkerPool& pool,
         BodySliceFn body = nullptr, WallVelocityFn wall = nullptr)
      : lat_(&lat),
        mat_(mat),
        omega_(omega),
        pool_(&pool),
        body_fn_(std::move(body)),
        wall_fn_(std::move(wall)),
        f_(lat.num_nodes()),
        U_(lat.num_nodes()),
        body_(lat.num_nodes()),
        u_num_(lat.num_nodes()),
        u_star_(lat.num_nodes()) {
    if (!(omega > 0.0 && omega <= 2.0))
      throw std::invalid_argument("omega must lie in (0, 2]");
    cfl_ok_ = cfl_check(mat, lat.disc().c).pass;
  }

  /// omega != 2 drops the scheme to first order; callers surface this warning.
  bool first_order_only() const { return omega_ != 2.0; }

  /// False when the sub-characteristic condition fails; stepping such a
  /// configuration is allowed (to reproduce blow-up) but never silent.
  bool cfl_ok() const { return cfl_ok_; }

  const Lattice& lattice() const { return *lat_; }
  const Material& material() const { return mat_; }
  double omega() const { return omega_; }
  std::size_t step_index() const { return m_; }
  double time() const { return static_cast<double>(m_) * lat_->disc().dt; }

  const PopulationField& populations() const { return f_; }
  PopulationField& populations() { return f_; }
  const std::vector<State>& state() const { return U_; }
  const std::vector<Vec2>& displacement() const { return u_num_; }

  Vec2 velocity(std::size_t node) const {
    return {mat_.V * U_[node][0], mat_.V * U_[node][1]};
  }
  Stress stress(std::size_t node) const { return stress_from_state(mat_, U_[node]); }

  /// Second-order initialization from closed-form data at t = 0.
  void initialize(const InitDataFn& data, bool second_order = true) {
    m_ = 0;
    refresh_body(0.0);
    init_populations(*lat_, mat_, data, f_.current(), second_order);
    compute_moments();
    for (std::size_t n = 0; n < lat_->num_nodes(); ++n) {
      const Vec2 p = lat_->node_pos(n);
      u_num_[n] = data(p.x, p.y).u0;
    }
  }

  /// Starts from explicitly given populations (synthetic tests).
  void set_populations(const std::vector<double>& values) {
    if (values.size() != lat_->num_nodes() * kStatePerNode)
      throw std::invalid_argument("set_populations: wrong size");
    m_ = 0;
    refresh_body(0.0);
    std::copy(values.begin(), values.end(), f_.current());
    compute_moments();
    for (auto& u : u_num_) u = Vec2{};
  }

  void step() {
    const std::size_t n = lat_->num_nodes();
    const double dt = lat_->disc().dt;
    const double c = lat_->disc().c;
    const double half_dt = 0.5 * dt;
    const double t_half = (static_cast<double>(m_) + 0.5) * dt;

    // (1c)+(1d) equilibria and collision, in place
    double* cur = f_.current();
    pool_->for_tiles(n, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t node = b; node < e; ++node)
        collide_node(mat_, c, omega_, U_[node], cur + node * kStatePerNode);
    });

    // (2a) interior streaming, (2b) boundary closure
    double* nxt = f_.next();
    stream_interior(*lat_, cur, nxt, *pool_);
    if (lat_->mode() == BcMode::periodic)
      apply_periodic(*lat_, cur, nxt);
    else
      apply_dirichlet(*lat_, mat_, cur, nxt, t_half, wall_fn_);

    // (2c) displacement accumulator with the same v_num used for collision
    pool_->for_tiles(n, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t node = b; node < e; ++node) {
        u_star_[node].x = u_num_[node].x + half_dt * mat_.V * U_[node][0];
        u_star_[node].y = u_num_[node].y + half_dt * mat_.V * U_[node][1];
      }
    });

    f_.swap_buffers();
    ++m_;

    // (1a) moments and (1b) trapezoidal displacement update at the new level
    refresh_body(time());
    const double* f = f_.current();
    pool_->for_tiles(n, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t node = b; node < e; ++node) {
        State body{{body_[node].x, body_[node].y, 0.0, 0.0, 0.0}};
        const State u = moments_at(f + node * kStatePerNode, body, dt);
        U_[node] = u;
        u_num_[node].x = u_star_[node].x + half_dt * mat_.V * u[0];
        u_num_[node].y = u_star_[node].y + half_dt * mat_.V * u[1];
      }
    });
  }

 private:
  void refresh_body(double t) {
    if (body_fn_)
      body_fn_(t, std::span<Vec2>(body_));
    else
      for (auto& b : body_) b = Vec2{};
  }

  void compute_moments() {
    const double dt = lat_->disc().dt;
    const double* f = f_.current();
    pool_->for_tiles(lat_->num_nodes(), [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t node = b; node < e; ++node) {
        State body{{body_[node].x, body_[node].y, 0.0, 0.0, 0.0}};
        U_[node] = moments_at(f + node * kStatePerNode, body, dt);
      }
    });
  }

  const Lattice* lat_;
  Material mat_;
  double omega_;
  WorkerPool* pool_;
  BodySliceFn body_fn_;
  WallVelocityFn wall_fn_;

  PopulationField f_;
  std::vector<State> U_;
  std::vector<Vec2> body_;
  std::vector<Vec2> u_num_;
  std::vector<Vec2> u_star_;
  std::size_t m_ = 0;
  bool cfl_ok_ = false;
};

}  // namespace elbm
