#pragma once

#include <cmath>
#include <stdexcept>

#include "elbm/core.hpp"
#include "elbm/smallmat.hpp"

namespace elbm {

/// Material parameters in dimensionless form plus the reference scales used to
/// recover dimensional output. The squared wave speeds are stored because the
/// parameter studies are specified as (cK^2, cmu^2) pairs.
struct Material {
  double rho = 1.0;   // absorbed by rescaling; kept for documentation
  double cK2 = 1.0;   // squared dimensionless dilatational wave speed
  double cmu2 = 0.0;  // squared dimensionless shear wave speed
  double L = 1.0;     // reference length
  double T = 1.0;     // reference time
  double V = 1.0;     // reference velocity scale

  Material() = default;
  Material(double cK2_, double cmu2_) : cK2(cK2_), cmu2(cmu2_) { validate(); }

  void validate() const {
    if (cK2 < 0.0 || cmu2 < 0.0 || (cK2 == 0.0 && cmu2 == 0.0))
      throw std::invalid_argument("wave speeds must be >= 0 and not both zero");
    if (rho <= 0.0 || L <= 0.0 || T <= 0.0 || V <= 0.0)
      throw std::invalid_argument("reference scales must be positive");
  }

  double cK() const { return std::sqrt(cK2); }
  double cmu() const { return std::sqrt(cmu2); }

  // dimensional wave speeds
  double cK_dim() const { return L / T * cK(); }
  double cmu_dim() const { return L / T * cmu(); }
};

/// x-flux of the first-order system applied to a state.
inline State flux_x(const Material& m, const State& u) {
  const double ck = m.cK(), cm = m.cmu();
  return {{ck * u.js() + cm * u.jd(), cm * u.jxy(), ck * u.vx(), cm * u.vx(),
           cm * u.vy()}};
}

/// y-flux of the first-order system applied to a state.
inline State flux_y(const Material& m, const State& u) {
  const double ck = m.cK(), cm = m.cmu();
  return {{cm * u.jxy(), ck * u.js() - cm * u.jd(), ck * u.vy(), -cm * u.vy(),
           cm * u.vx()}};
}

/// Dense symmetric flux matrices with flux_x(U) = Ax U and flux_y(U) = Ay U.
struct FluxMatrices {
  Mat5 Ax;
  Mat5 Ay;
};

inline FluxMatrices flux_matrices(const Material& m) {
  const double ck = m.cK(), cm = m.cmu();
  FluxMatrices fm;
  fm.Ax(0, 2) = ck;
  fm.Ax(0, 3) = cm;
  fm.Ax(1, 4) = cm;
  fm.Ax(2, 0) = ck;
  fm.Ax(3, 0) = cm;
  fm.Ax(4, 1) = cm;
  fm.Ay(0, 4) = cm;
  fm.Ay(1, 2) = ck;
  fm.Ay(1, 3) = -cm;
  fm.Ay(2, 1) = ck;
  fm.Ay(3, 1) = -cm;
  fm.Ay(4, 0) = cm;
  return fm;
}

/// Cauchy stress recovered from the primary solution vector,
/// sigma = -V [[0,0,cK,cmu,0],[0,0,cK,-cmu,0],[0,0,0,0,cmu]] U
/// with dimensional wave speeds.
inline Stress stress_from_state(const Material& m, const State& u) {
  const double ck = m.cK_dim(), cm = m.cmu_dim(), v = m.V;
  return {-v * (ck * u.js() + cm * u.jd()), -v * (ck * u.js() - cm * u.jd()),
          -v * cm * u.jxy()};
}

/// Source term of the half-way Dirichlet closure for link (i,j) given the
/// boundary-value time derivative evaluated at the wall point.
inline State dirichlet_source(const Material& m, int i, int j, Vec2 du_dt) {
  const double ck = m.cK(), cm = m.cmu();
  return {{0.5 * du_dt.x, 0.5 * du_dt.y, i * ck * du_dt.x + j * ck * du_dt.y,
           i * cm * du_dt.x - j * cm * du_dt.y,
           j * cm * du_dt.x + i * cm * du_dt.y}};
}

}  // namespace elbm
