#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace elbm {

/// Dense fixed-size square matrix, row-major. Sized for the 5x5 flux/symmetrizer
/// blocks and the 20x20 assembled collision matrices.
template <std::size_t N>
struct Mat {
  std::array<double, N * N> a{};

  double& operator()(std::size_t r, std::size_t c) { return a[r * N + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a[r * N + c]; }

  static Mat identity() {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  friend Mat operator+(const Mat& x, const Mat& y) {
    Mat r;
    for (std::size_t i = 0; i < N * N; ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
  }
  friend Mat operator-(const Mat& x, const Mat& y) {
    Mat r;
    for (std::size_t i = 0; i < N * N; ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
  }
  friend Mat operator*(double s, const Mat& x) {
    Mat r;
    for (std::size_t i = 0; i < N * N; ++i) r.a[i] = s * x.a[i];
    return r;
  }
  friend Mat operator*(const Mat& x, const Mat& y) {
    Mat r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const double xik = x(i, k);
        for (std::size_t j = 0; j < N; ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  }

  std::array<double, N> mul(const std::array<double, N>& v) const {
    std::array<double, N> r{};
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += (*this)(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  Mat transposed() const {
    Mat r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }

  double max_asymmetry() const {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j)
        m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
  }
};

using Mat5 = Mat<5>;

/// Gauss-Jordan inverse with partial pivoting. Throws on a (numerically)
/// singular matrix.
template <std::size_t N>
Mat<N> inverse(Mat<N> m) {
  Mat<N> inv = Mat<N>::identity();
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (std::abs(m(piv, col)) < 1e-300)
      throw std::runtime_error("singular matrix in inverse()");
    if (piv != col)
      for (std::size_t j = 0; j < N; ++j) {
        std::swap(m(piv, j), m(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const double d = 1.0 / m(col, col);
    for (std::size_t j = 0; j < N; ++j) {
      m(col, j) *= d;
      inv(col, j) *= d;
    }
    for (std::size_t r = 0; r < N; ++r) {
      if (r == col) continue;
      const double f = m(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < N; ++j) {
        m(r, j) -= f * m(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (unsorted); if `vectors` is non-null it receives the
/// orthogonal matrix V with A = V diag(w) V^T stored column-wise.
template <std::size_t N>
std::array<double, N> symmetric_eigenvalues(Mat<N> a, Mat<N>* vectors = nullptr) {
  Mat<N> v = Mat<N>::identity();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-60) break;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::array<double, N> w{};
  for (std::size_t i = 0; i < N; ++i) w[i] = a(i, i);
  if (vectors) *vectors = v;
  return w;
}

/// Symmetric matrix power A^p for real p (via eigen-decomposition). Requires
/// positive eigenvalues for non-integer p.
template <std::size_t N>
Mat<N> symmetric_power(const Mat<N>& a, double p) {
  Mat<N> v;
  auto w = symmetric_eigenvalues(a, &v);
  Mat<N> r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < N; ++k) s += v(i, k) * std::pow(w[k], p) * v(j, k);
      r(i, j) = s;
    }
  return r;
}

}  // namespace elbm
