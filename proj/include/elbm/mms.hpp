#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "elbm/core.hpp"
#include "elbm/grid.hpp"
#include "elbm/material.hpp"

namespace elbm {

inline constexpr double kPi = 3.14159265358979323846;

/// One harmonic factor sin(k*s + kt*t + phase) of a single spatial coordinate
/// s (or none, k = 0) and time. Cosine factors are expressed through a phase
/// shift of pi/2.
struct Harmonic {
  double k = 0.0;
  double kt = 0.0;
  double phase = 0.0;
};

/// Values of one factor and its partial derivatives at a point.
struct FactorEval {
  double v = 0.0;
  double ds1 = 0.0;   // d/ds
  double ds2 = 0.0;   // d2/ds2
  double dt1 = 0.0;   // d/dt
  double dt2 = 0.0;   // d2/dt2
  double dsdt = 0.0;  // d2/ds dt
};

inline FactorEval eval_factor_trig(const Harmonic& h, double sin_th, double cos_th) {
  FactorEval f;
  f.v = sin_th;
  f.ds1 = h.k * cos_th;
  f.ds2 = -h.k * h.k * sin_th;
  f.dt1 = h.kt * cos_th;
  f.dt2 = -h.kt * h.kt * sin_th;
  f.dsdt = -h.k * h.kt * sin_th;
  return f;
}

inline FactorEval eval_factor(const Harmonic& h, double s, double t) {
  const double th = h.k * s + h.kt * t + h.phase;
  return eval_factor_trig(h, std::sin(th), std::cos(th));
}

/// Partial derivatives of one scalar displacement component up to the orders
/// needed by the scheme: value, gradient, time derivative, second spatial
/// derivatives, second time derivative and the mixed time-space derivatives.
struct UDerivs {
  double u = 0.0;
  double ux = 0.0, uy = 0.0, ut = 0.0;
  double uxx = 0.0, uyy = 0.0, uxy = 0.0;
  double utt = 0.0, utx = 0.0, uty = 0.0;
};

/// Product X(x,t) * Y(y,t) * C(t) of three harmonic factors.
struct TriProduct {
  Harmonic fx;  // depends on x (and t)
  Harmonic fy;  // depends on y (and t)
  Harmonic ft;  // depends on t only (k = 0)

  static UDerivs assemble(const FactorEval& a, const FactorEval& b, const FactorEval& c) {
    UDerivs d;
    d.u = a.v * b.v * c.v;
    d.ux = a.ds1 * b.v * c.v;
    d.uy = a.v * b.ds1 * c.v;
    d.ut = a.dt1 * b.v * c.v + a.v * b.dt1 * c.v + a.v * b.v * c.dt1;
    d.uxx = a.ds2 * b.v * c.v;
    d.uyy = a.v * b.ds2 * c.v;
    d.uxy = a.ds1 * b.ds1 * c.v;
    d.utt = a.dt2 * b.v * c.v + a.v * b.dt2 * c.v + a.v * b.v * c.dt2 +
            2.0 * (a.dt1 * b.dt1 * c.v + a.dt1 * b.v * c.dt1 + a.v * b.dt1 * c.dt1);
    d.utx = a.dsdt * b.v * c.v + a.ds1 * b.dt1 * c.v + a.ds1 * b.v * c.dt1;
    d.uty = a.v * b.dsdt * c.v + a.dt1 * b.ds1 * c.v + a.v * b.ds1 * c.dt1;
    return d;
  }

  UDerivs eval(double x, double y, double t) const {
    return assemble(eval_factor(fx, x, t), eval_factor(fy, y, t), eval_factor(ft, 0.0, t));
  }
};

/// State vector built from displacement derivatives (dimensionless form).
inline State state_from_derivs(const Material& m, const UDerivs& a, const UDerivs& b) {
  const double ck = m.cK(), cm = m.cmu();
  return {{a.ut, b.ut, -ck * (a.ux + b.uy), -cm * (a.ux - b.uy), -cm * (b.ux + a.uy)}};
}

inline State state_x_deriv(const Material& m, const UDerivs& a, const UDerivs& b) {
  const double ck = m.cK(), cm = m.cmu();
  return {{a.utx, b.utx, -ck * (a.uxx + b.uxy), -cm * (a.uxx - b.uxy), -cm * (b.uxx + a.uxy)}};
}

inline State state_y_deriv(const Material& m, const UDerivs& a, const UDerivs& b) {
  const double ck = m.cK(), cm = m.cmu();
  return {{a.uty, b.uty, -ck * (a.uxy + b.uyy), -cm * (a.uxy - b.uyy), -cm * (b.uxy + a.uyy)}};
}

inline Stress stress_from_derivs(const Material& m, const UDerivs& a, const UDerivs& b) {
  const double div = a.ux + b.uy;
  return {m.cK2 * div + m.cmu2 * (2.0 * a.ux - div),
          m.cK2 * div + m.cmu2 * (2.0 * b.uy - div), m.cmu2 * (b.ux + a.uy)};
}

/// Body load b = dtt(u) - div(sigma(u)) of the displacement field.
inline Vec2 body_from_derivs(const Material& m, const UDerivs& a, const UDerivs& b) {
  return {a.utt - m.cK2 * (a.uxx + b.uxy) - m.cmu2 * (a.uxx + a.uyy),
          b.utt - m.cK2 * (a.uxy + b.uyy) - m.cmu2 * (b.uxx + b.uyy)};
}

/// A closed-form displacement field with everything the solver and the
/// verification harness derive from it: initial data, body load, boundary
/// data and exact reference fields.
struct ManufacturedCase {
  std::string name;
  TriProduct comp[2];     // u_x, u_y
  bool has_exact = true;  // exact fields valid for t > 0 (error norms allowed)
  bool zero_body = true;  // body load forced to zero instead of derived
  bool homogeneous_wall = true;  // du_D/dt forced to zero

  void derivs(double x, double y, double t, UDerivs& a, UDerivs& b) const {
    a = comp[0].eval(x, y, t);
    b = comp[1].eval(x, y, t);
  }

  Vec2 exact_u(double x, double y, double t) const {
    UDerivs a, b;
    derivs(x, y, t, a, b);
    return {a.u, b.u};
  }

  Vec2 exact_v(double x, double y, double t) const {
    UDerivs a, b;
    derivs(x, y, t, a, b);
    return {a.ut, b.ut};
  }

  State exact_state(const Material& m, double x, double y, double t) const {
    UDerivs a, b;
    derivs(x, y, t, a, b);
    return state_from_derivs(m, a, b);
  }

  Stress exact_stress(const Material& m, double x, double y, double t) const {
    UDerivs a, b;
    derivs(x, y, t, a, b);
    return stress_from_derivs(m, a, b);
  }

  Vec2 body(const Material& m, double x, double y, double t) const {
    if (zero_body) return {0.0, 0.0};
    UDerivs a, b;
    derivs(x, y, t, a, b);
    return body_from_derivs(m, a, b);
  }

  Vec2 du_D_dt(double x, double y, double t) const {
    if (homogeneous_wall) return {0.0, 0.0};
    return exact_v(x, y, t);
  }
};

/// L-periodic travelling-wave case used for the convergence studies.
inline ManufacturedCase case_wave52() {
  ManufacturedCase c;
  c.name = "wave52";
  c.has_exact = true;
  c.zero_body = false;
  c.homogeneous_wall = false;
  // u_x = sin(4 pi (x - 0.3 t)) * cos(2 pi (y - 0.8 t)) * sin(4 pi (t - 0.1))
  c.comp[0].fx = {4.0 * kPi, -1.2 * kPi, 0.0};
  c.comp[0].fy = {2.0 * kPi, -1.6 * kPi, 0.5 * kPi};
  c.comp[0].ft = {0.0, 4.0 * kPi, -0.4 * kPi};
  // u_y = cos(4 pi (x - 0.7 t)) * sin(2 pi (y - 0.1 t)) * cos(4 pi (t + 0.4))
  c.comp[1].fx = {4.0 * kPi, -2.8 * kPi, 0.5 * kPi};
  c.comp[1].fy = {2.0 * kPi, -0.2 * kPi, 0.0};
  c.comp[1].ft = {0.0, 4.0 * kPi, 1.6 * kPi + 0.5 * kPi};
  return c;
}

/// Initial data for the long-term stability runs: a standing field compatible
/// with homogeneous Dirichlet walls on the unit square, zero body load. The
/// case provides initial data only; there is no closed-form solution at t > 0.
inline ManufacturedCase case_stability_ic() {
  ManufacturedCase c;
  c.name = "stability_ic";
  c.has_exact = false;
  c.zero_body = true;
  c.homogeneous_wall = true;
  // u_x = sin(4 pi x) * sin(2 pi y) * sin(4 pi (t - 0.1))
  c.comp[0].fx = {4.0 * kPi, 0.0, 0.0};
  c.comp[0].fy = {2.0 * kPi, 0.0, 0.0};
  c.comp[0].ft = {0.0, 4.0 * kPi, -0.4 * kPi};
  // u_y = sin(4 pi x) * sin(2 pi y) * sin(4 pi (t + 0.4))
  c.comp[1].fx = {4.0 * kPi, 0.0, 0.0};
  c.comp[1].fy = {2.0 * kPi, 0.0, 0.0};
  c.comp[1].ft = {0.0, 4.0 * kPi, 1.6 * kPi};
  return c;
}

inline ManufacturedCase manufactured_case(const std::string& name) {
  if (name == "wave52") return case_wave52();
  if (name == "stability_ic") return case_stability_ic();
  throw std::invalid_argument("unknown manufactured case: " + name);
}

/// Per-time-slice factor tables over the lattice coordinates. Harmonic factors
/// are sampled once per distinct x (or y) value, so evaluating a full slice
/// costs O(nx + ny) trigonometric calls instead of O(nx * ny).
class CaseSlice {
 public:
  CaseSlice(const ManufacturedCase& c, const Lattice& lat, double t)
      : case_(&c), t_(t) {
    const auto& d = lat.disc();
    for (int comp = 0; comp < 2; ++comp) {
      fill(c.comp[comp].fx, d.x0.x, d.dx, d.nx, t, fx_[comp]);
      fill(c.comp[comp].fy, d.x0.y, d.dx, d.ny, t, fy_[comp]);
      ft_[comp] = eval_factor(c.comp[comp].ft, 0.0, t);
    }
  }

  double t() const { return t_; }

  void derivs(std::size_t k, std::size_t l, UDerivs& a, UDerivs& b) const {
    a = TriProduct::assemble(fx_[0][k], fy_[0][l], ft_[0]);
    b = TriProduct::assemble(fx_[1][k], fy_[1][l], ft_[1]);
  }

  const ManufacturedCase& mcase() const { return *case_; }

 private:
  void fill(const Harmonic& h, double s0, double ds, std::size_t n, double t,
            std::vector<FactorEval>& out) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = eval_factor(h, s0 + static_cast<double>(i) * ds, t);
  }

  const ManufacturedCase* case_;
  double t_;
  std::vector<FactorEval> fx_[2];
  std::vector<FactorEval> fy_[2];
  FactorEval ft_[2];
};

}  // namespace elbm
