#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elbm/core.hpp"
#include "elbm/grid.hpp"
#include "elbm/material.hpp"
#include "elbm/mms.hpp"
#include "elbm/parallel.hpp"
#include "elbm/solver.hpp"
#include "elbm/stabmon.hpp"

namespace elbm {

struct ErrorNorms {
  double l2 = 0.0;
  double linf = 0.0;
  double l2rel = 0.0;
  double linfrel = 0.0;
};

/// Space-time error norms of one run against the exact fields of a
/// manufactured case.
struct ErrorReport {
  ErrorNorms u;
  ErrorNorms sigma;
  double dx = 0.0;
  double dt = 0.0;
  std::size_t slices = 0;
  std::size_t sample_stride = 1;  // time-sampling cadence of the norms
  double wall_seconds = 0.0;
  bool divergent = false;
};

/// Accumulates squared error and reference sums over all recorded time slices.
/// Tile partials are combined in a fixed order, so the result does not depend
/// on the worker count. A sample stride > 1 thins the time sampling of the
/// space-time norms (for long runs); the quadrature weight scales with it.
class ErrorAccumulator {
 public:
  ErrorAccumulator(const ManufacturedCase& c, const Lattice& lat, const Material& m,
                   WorkerPool& pool, std::size_t sample_stride = 1)
      : case_(&c), lat_(&lat), mat_(m), pool_(&pool), stride_(sample_stride),
        partials_(WorkerPool::num_tiles(lat.num_nodes())) {}

  /// Adds the current solver fields (one time slice) to the space-time sums.
  void accumulate(const Solver& s) {
    accumulate_slice(
        s.time(), [&](std::size_t n) { return s.displacement()[n]; },
        [&](std::size_t n) { return s.stress(n); });
  }

  /// Same accumulation from explicit per-node fields.
  template <class UField, class SigmaField>
  void accumulate_slice(double t, UField&& u_of, SigmaField&& sigma_of) {
    const CaseSlice slice(*case_, *lat_, t);
    const std::size_t nx = lat_->nx();
    pool_->for_tiles(lat_->num_nodes(), [&](std::size_t b, std::size_t e, std::size_t tile) {
      Partial p;
      UDerivs a, bd;
      for (std::size_t node = b; node < e; ++node) {
        slice.derivs(node % nx, node / nx, a, bd);
        const Vec2 ue = u_of(node);
        const double eux = ue.x - a.u;
        const double euy = ue.y - bd.u;
        p.eu2 += eux * eux + euy * euy;
        p.u2 += a.u * a.u + bd.u * bd.u;
        p.linf_u = std::max(p.linf_u, std::max(std::abs(eux), std::abs(euy)));
        const Stress sh = stress_from_derivs(mat_, a, bd);
        const Stress sn = sigma_of(node);
        const double e1 = sn.xx - sh.xx, e2 = sn.yy - sh.yy, e3 = sn.xy - sh.xy;
        p.es2 += e1 * e1 + e2 * e2 + e3 * e3;
        p.s2 += sh.xx * sh.xx + sh.yy * sh.yy + sh.xy * sh.xy;
        p.linf_s = std::max({p.linf_s, std::abs(e1), std::abs(e2), std::abs(e3)});
      }
      partials_[tile] = p;
    });
    for (const Partial& p : partials_) {
      sum_.eu2 += p.eu2;
      sum_.u2 += p.u2;
      sum_.es2 += p.es2;
      sum_.s2 += p.s2;
      sum_.linf_u = std::max(sum_.linf_u, p.linf_u);
      sum_.linf_s = std::max(sum_.linf_s, p.linf_s);
    }
    ++slices_;
  }

  ErrorReport report() const {
    ErrorReport r;
    const double dx = lat_->disc().dx;
    const double dt = lat_->disc().dt;
    const double cell = dx * dx * (dt * static_cast<double>(stride_));
    r.dx = dx;
    r.dt = dt;
    r.slices = slices_;
    r.sample_stride = stride_;
    r.u.l2 = std::sqrt(cell * sum_.eu2);
    r.u.linf = sum_.linf_u;
    const double ref_u = std::sqrt(cell * sum_.u2);
    r.u.l2rel = r.u.l2 / ref_u;
    r.u.linfrel = r.u.linf / ref_u;
    r.sigma.l2 = std::sqrt(cell * sum_.es2);
    r.sigma.linf = sum_.linf_s;
    const double ref_s = std::sqrt(cell * sum_.s2);
    r.sigma.l2rel = r.sigma.l2 / ref_s;
    r.sigma.linfrel = r.sigma.linf / ref_s;
    return r;
  }

 private:
  struct Partial {
    double eu2 = 0.0, u2 = 0.0, es2 = 0.0, s2 = 0.0;
    double linf_u = 0.0, linf_s = 0.0;
  };

  const ManufacturedCase* case_;
  const Lattice* lat_;
  Material mat_;
  WorkerPool* pool_;
  std::size_t stride_;
  std::vector<Partial> partials_;
  Partial sum_;
  std::size_t slices_ = 0;
};

/// Space-only relative L2 displacement error of the current slice,
/// L2rel^Omega = sqrt(sum |e_u|^2 / sum |u_hat|^2).
inline double spatial_error_l2rel(const ManufacturedCase& c, const Solver& s,
                                  WorkerPool& pool) {
  const Lattice& lat = s.lattice();
  const CaseSlice slice(c, lat, s.time());
  const std::size_t nx = lat.nx();
  const std::size_t ntiles = WorkerPool::num_tiles(lat.num_nodes());
  std::vector<double> pe(ntiles, 0.0), pu(ntiles, 0.0);
  pool.for_tiles(lat.num_nodes(), [&](std::size_t b, std::size_t e, std::size_t tile) {
    double se = 0.0, su = 0.0;
    UDerivs a, bd;
    for (std::size_t node = b; node < e; ++node) {
      slice.derivs(node % nx, node / nx, a, bd);
      const Vec2 ue = s.displacement()[node];
      const double ex = ue.x - a.u, ey = ue.y - bd.u;
      se += ex * ex + ey * ey;
      su += a.u * a.u + bd.u * bd.u;
    }
    pe[tile] = se;
    pu[tile] = su;
  });
  double se = 0.0, su = 0.0;
  for (std::size_t t = 0; t < ntiles; ++t) {
    se += pe[t];
    su += pu[t];
  }
  return std::sqrt(se / su);
}

/// Builds the solver initialization data for a manufactured case.
inline InitDataFn case_init_data(const ManufacturedCase& c, const Material& m) {
  return [&c, m](double x, double y) {
    UDerivs a, b;
    c.derivs(x, y, 0.0, a, b);
    NodeInit d;
    d.u0 = {a.u, b.u};
    d.U0 = state_from_derivs(m, a, b);
    d.dxU0 = state_x_deriv(m, a, b);
    d.dyU0 = state_y_deriv(m, a, b);
    const Vec2 body = c.zero_body ? Vec2{} : body_from_derivs(m, a, b);
    d.B0 = {{body.x, body.y, 0.0, 0.0, 0.0}};
    return d;
  };
}

inline BodySliceFn case_body_slice(const ManufacturedCase& c, const Lattice& lat,
                                   const Material& m) {
  if (c.zero_body) return nullptr;
  return [&c, &lat, m](double t, std::span<Vec2> out) {
    const CaseSlice slice(c, lat, t);
    const std::size_t nx = lat.nx();
    UDerivs a, b;
    for (std::size_t node = 0; node < out.size(); ++node) {
      slice.derivs(node % nx, node / nx, a, b);
      out[node] = body_from_derivs(m, a, b);
    }
  };
}

inline WallVelocityFn case_wall_velocity(const ManufacturedCase& c) {
  if (c.homogeneous_wall) return nullptr;
  return [&c](Vec2 xb, double t) { return c.du_D_dt(xb.x, xb.y, t); };
}

/// One convergence-study run: solve the case on one discretization and return
/// the space-time error report. Errors are sampled at every time step by
/// default; a stride > 1 thins the time sampling only.
inline ErrorReport run_error_study(const ManufacturedCase& c, BcMode mode,
                                   const Material& m, double dx, double dt,
                                   double t_final, double omega, WorkerPool& pool,
                                   bool second_order_init = true,
                                   std::size_t sample_stride = 1) {
  if (!c.has_exact)
    throw std::invalid_argument("case has no exact solution for error norms");
  const auto t0 = std::chrono::steady_clock::now();
  const Lattice lat = build_lattice({1.0, 1.0}, dx, dt, mode, t_final);
  Solver solver(lat, m, omega, pool, case_body_slice(c, lat, m), case_wall_velocity(c));
  solver.initialize(case_init_data(c, m), second_order_init);

  const Symmetrizer sym(m, lat.disc().c);
  const double norm0 = weighted_norm(sym, solver.populations(), pool);

  ErrorAccumulator acc(c, lat, m, pool, sample_stride);
  const std::size_t steps = static_cast<std::size_t>(std::llround(t_final / dt));
  ErrorReport rep;
  for (std::size_t s = 1; s <= steps; ++s) {
    solver.step();
    if (s % sample_stride == 0) acc.accumulate(solver);
    if (s % 100 == 0 || s == steps) {
      const double norm = weighted_norm(sym, solver.populations(), pool);
      if (!std::isfinite(norm) || norm > 1e6 * norm0) {
        rep = acc.report();
        rep.divergent = true;
        return rep;
      }
    }
  }
  rep = acc.report();
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Observed convergence order between two refinement levels.
inline double observed_order(double err_coarse, double err_fine, double dx_coarse,
                             double dx_fine) {
  return std::log(err_coarse / err_fine) / std::log(dx_coarse / dx_fine);
}

struct StudyRow {
  std::string case_name;
  BcMode mode{};
  double ck2 = 0.0, cmu2 = 0.0;
  double dx = 0.0, dt = 0.0;
  std::string field;  // "u" or "sigma"
  std::string norm;   // "l2" or "linf"
  double error = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();  // vs previous level
  bool divergent = false;
};

/// Runs the case for every material on every discretization (shared lattice
/// speed required) and fits observed orders between consecutive levels.
inline std::vector<StudyRow> convergence_study(
    const ManufacturedCase& c, BcMode mode, const std::vector<Material>& materials,
    const std::vector<std::pair<double, double>>& discretizations, double t_final,
    double omega, WorkerPool& pool, bool second_order_init = true,
    const std::function<void(const StudyRow&)>& on_row = nullptr) {
  if (discretizations.empty()) throw std::invalid_argument("empty discretization list");
  const double c0 = discretizations.front().first / discretizations.front().second;
  for (const auto& [dx, dt] : discretizations)
    if (std::abs(dx / dt - c0) > 1e-12 * c0)
      throw std::invalid_argument("discretizations must share the lattice speed");
  for (const Material& m : materials)
    if (!cfl_check(m, c0).pass)
      throw std::invalid_argument("CFL condition violated for a study material");

  std::vector<StudyRow> rows;
  for (const Material& m : materials) {
    ErrorReport prev;
    bool have_prev = false;
    for (const auto& [dx, dt] : discretizations) {
      const ErrorReport rep =
          run_error_study(c, mode, m, dx, dt, t_final, omega, pool, second_order_init);
      auto emit = [&](const std::string& field, const std::string& norm, double err,
                      double prev_err) {
        StudyRow row;
        row.case_name = c.name;
        row.mode = mode;
        row.ck2 = m.cK2;
        row.cmu2 = m.cmu2;
        row.dx = dx;
        row.dt = dt;
        row.field = field;
        row.norm = norm;
        row.error = err;
        row.divergent = rep.divergent;
        if (have_prev && !rep.divergent)
          row.order = observed_order(prev_err, err, prev.dx, dx);
        rows.push_back(row);
        if (on_row) on_row(rows.back());
      };
      emit("u", "l2", rep.u.l2, prev.u.l2);
      emit("u", "linf", rep.u.linf, prev.u.linf);
      emit("sigma", "l2", rep.sigma.l2, prev.sigma.l2);
      emit("sigma", "linf", rep.sigma.linf, prev.sigma.linf);
      prev = rep;
      have_prev = true;
    }
  }
  return rows;
}

}  // namespace elbm
