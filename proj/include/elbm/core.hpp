#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace elbm {

/// 2-vector for positions, displacements and velocities.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

/// Primary solution vector of the first-order system: (v_x, v_y, j_s, j_d, j_xy).
/// The component order is fixed globally; every matrix in the library assumes it.
struct State {
  std::array<double, 5> c{};

  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }

  double vx() const { return c[0]; }
  double vy() const { return c[1]; }
  double js() const { return c[2]; }
  double jd() const { return c[3]; }
  double jxy() const { return c[4]; }

  friend State operator+(const State& a, const State& b) {
    return {{a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2], a.c[3] + b.c[3],
             a.c[4] + b.c[4]}};
  }
  friend State operator-(const State& a, const State& b) {
    return {{a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2], a.c[3] - b.c[3],
             a.c[4] - b.c[4]}};
  }
  friend State operator*(double s, const State& a) {
    return {{s * a.c[0], s * a.c[1], s * a.c[2], s * a.c[3], s * a.c[4]}};
  }
  State& operator+=(const State& b) {
    for (std::size_t i = 0; i < 5; ++i) c[i] += b.c[i];
    return *this;
  }

  bool finite() const {
    for (double v : c)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Stress components (sigma_xx, sigma_yy, sigma_xy).
struct Stress {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

constexpr std::size_t kNumLinks = 4;
constexpr std::size_t kNumComps = 5;
constexpr std::size_t kStatePerNode = kNumLinks * kNumComps;

/// Anti bounce-back sign pattern D = diag(-1,-1,1,1,1): the velocity
/// components flip at a wall, the flux-type components bounce back unchanged.
constexpr std::array<double, kNumComps> kBounceSigns{-1.0, -1.0, 1.0, 1.0, 1.0};

}  // namespace elbm
