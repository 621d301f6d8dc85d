#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "elbm/core.hpp"
#include "elbm/grid.hpp"
#include "elbm/kernel.hpp"
#include "elbm/material.hpp"
#include "elbm/parallel.hpp"
#include "elbm/smallmat.hpp"

namespace elbm {

/// Sub-characteristic (CFL) condition: the fastest physical wave, times the
/// number of spatial dimensions, must stay below the lattice speed.
struct CflResult {
  bool pass = false;
  double margin = 0.0;  // 2 sqrt(cK^2 + cmu^2) / c, must be < 1
};

inline CflResult cfl_check(const Material& m, double c) {
  CflResult r;
  r.margin = 2.0 * std::sqrt(m.cK2 + m.cmu2) / c;
  r.pass = r.margin < 1.0;
  return r;
}

/// g_ij = 1/4 I + 1/(2c) (i Ax + j Ay) for link (i,j).
inline Mat5 equilibrium_block(const Material& m, double c, int i, int j) {
  const FluxMatrices fm = flux_matrices(m);
  Mat5 g = 0.25 * Mat5::identity() + (1.0 / (2.0 * c)) * (static_cast<double>(i) * fm.Ax +
                                                          static_cast<double>(j) * fm.Ay);
  return g;
}

/// The four symmetric positive definite weight blocks k_ij = g_ij^-1 defining
/// the weighted L2 grid norm. Construction fails if the CFL condition is
/// violated (the blocks lose positive definiteness).
class Symmetrizer {
 public:
  Symmetrizer(const Material& m, double c) : material_(m), c_(c) {
    for (std::size_t q = 0; q < kNumLinks; ++q) {
      const Mat5 g = equilibrium_block(m, c, VelocitySet::ci[q], VelocitySet::cj[q]);
      Mat5 k = inverse(g);
      // roundoff symmetry projection
      k = 0.5 * (k + k.transposed());
      const auto w = symmetric_eigenvalues(k);
      const double min_eig = *std::min_element(w.begin(), w.end());
      if (!(min_eig > 0.0))
        throw std::runtime_error(
            "symmetrizer block not positive definite (CFL condition violated)");
      blocks_[q] = k;
    }
  }

  const Mat5& block(std::size_t link) const { return blocks_[link]; }
  const Material& material() const { return material_; }
  double c() const { return c_; }

  /// Weighted squared norm contribution of one node's populations.
  double node_quadratic(const double* node_f) const {
    double s = 0.0;
    for (std::size_t q = 0; q < kNumLinks; ++q) {
      const double* f = node_f + q * kNumComps;
      const Mat5& k = blocks_[q];
      for (std::size_t r = 0; r < kNumComps; ++r) {
        double kr = 0.0;
        for (std::size_t cidx = 0; cidx < kNumComps; ++cidx) kr += k(r, cidx) * f[cidx];
        s += f[r] * kr;
      }
    }
    return s;
  }

 private:
  Material material_;
  double c_;
  std::array<Mat5, kNumLinks> blocks_;
};

/// Weighted L2 grid norm ||f||_P of the whole population field. The reduction
/// runs over fixed tiles so recorded values are identical for any worker count.
inline double weighted_norm(const Symmetrizer& sym, const PopulationField& f,
                            WorkerPool& pool) {
  const double* data = f.current();
  const double s = pool.reduce_sum(f.nodes(), [&](std::size_t b, std::size_t e) {
    double acc = 0.0;
    for (std::size_t node = b; node < e; ++node)
      acc += sym.node_quadratic(data + node * kStatePerNode);
    return acc;
  });
  return std::sqrt(s);
}

/// Plain (unweighted) L2 grid norm; the fallback divergence gauge for
/// CFL-violating configurations where no symmetrizer exists.
inline double plain_norm(const PopulationField& f, WorkerPool& pool) {
  const double* data = f.current();
  const double s = pool.reduce_sum(f.nodes(), [&](std::size_t b, std::size_t e) {
    double acc = 0.0;
    for (std::size_t i = b * kStatePerNode; i < e * kStatePerNode; ++i)
      acc += data[i] * data[i];
    return acc;
  });
  return std::sqrt(s);
}

/// Numerical verification of the collision algebra on the assembled 20x20
/// matrices: G is a projector with spectrum {0,1}, K symmetrizes J, and the
/// eigenvalues of -J = omega(I - G) lie in {0, omega}.
struct AlgebraReport {
  double projector_residual = 0.0;   // max|G^2 - G|
  double spectrum_g_residual = 0.0;  // max distance of spec(G) from {0,1}
  double kj_asymmetry = 0.0;         // max|KJ - (KJ)^T|
  double spectrum_j_residual = 0.0;  // max distance of spec(-J) from {0,omega}
  double bounce_identity_residual = 0.0;  // max|k_-i-j - D^T k_ij D|
  bool pass = false;
};

inline AlgebraReport algebra_checks(const Material& m, double c, double omega) {
  if (!cfl_check(m, c).pass)
    throw std::runtime_error("algebra_checks requires a CFL-passing configuration");
  constexpr std::size_t N = kNumLinks * kNumComps;

  Mat<N> G, K;
  std::array<Mat5, kNumLinks> g_blocks;
  for (std::size_t q = 0; q < kNumLinks; ++q) {
    g_blocks[q] = equilibrium_block(m, c, VelocitySet::ci[q], VelocitySet::cj[q]);
    for (std::size_t r = 0; r < kNumComps; ++r)
      for (std::size_t col = 0; col < kNumLinks * kNumComps; ++col)
        G(q * kNumComps + r, col) = g_blocks[q](r, col % kNumComps);
  }
  const Symmetrizer sym(m, c);
  for (std::size_t q = 0; q < kNumLinks; ++q)
    for (std::size_t r = 0; r < kNumComps; ++r)
      for (std::size_t s = 0; s < kNumComps; ++s)
        K(q * kNumComps + r, q * kNumComps + s) = sym.block(q)(r, s);

  const Mat<N> I = Mat<N>::identity();
  const Mat<N> J = omega * (G - I);

  AlgebraReport rep;
  rep.projector_residual = (G * G - G).max_abs();
  rep.kj_asymmetry = (K * J).max_asymmetry();

  // Similarity transform with K^{1/2} turns G and -J into symmetric matrices
  // (K G and K J are symmetric), so a Jacobi eigensolver applies.
  const Mat<N> k_half = symmetric_power(K, 0.5);
  const Mat<N> k_inv_half = symmetric_power(K, -0.5);
  auto spectrum_residual = [&](const Mat<N>& a, double v0, double v1) {
    Mat<N> s = k_half * a * k_inv_half;
    s = 0.5 * (s + s.transposed());
    const auto w = symmetric_eigenvalues(s);
    double res = 0.0;
    for (double lam : w) res = std::max(res, std::min(std::abs(lam - v0), std::abs(lam - v1)));
    return res;
  };
  rep.spectrum_g_residual = spectrum_residual(G, 0.0, 1.0);
  rep.spectrum_j_residual = spectrum_residual(-1.0 * J, 0.0, omega);

  for (std::size_t q = 0; q < kNumLinks; ++q) {
    const Mat5& k = sym.block(q);
    const Mat5& k_opp = sym.block(VelocitySet::opposite[q]);
    Mat5 dkd;
    for (std::size_t r = 0; r < kNumComps; ++r)
      for (std::size_t s = 0; s < kNumComps; ++s)
        dkd(r, s) = kBounceSigns[r] * k(r, s) * kBounceSigns[s];
    rep.bounce_identity_residual =
        std::max(rep.bounce_identity_residual, (k_opp - dkd).max_abs());
  }

  rep.pass = rep.projector_residual <= 1e-12 && rep.spectrum_g_residual <= 1e-10 &&
             rep.kj_asymmetry <= 1e-12 && rep.spectrum_j_residual <= 1e-10 &&
             rep.bounce_identity_residual <= 1e-14;
  return rep;
}

}  // namespace elbm
