#pragma once

// Independent reference arithmetic for the test suites. Nothing here goes
// through the library's counted kernels.

#include <cmath>
#include <cstdint>
#include <random>

#include "prootkit/matrix.hpp"

namespace proot::testing {

inline Matrix random_matrix(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(n, n);
  for (double& v : m.data()) v = u(rng);
  return m;
}

/// Diagonally dominant, so comfortably nonsingular.
inline Matrix well_conditioned(std::size_t n, std::uint64_t seed) {
  Matrix m = random_matrix(n, -1.0, 1.0, seed);
  for (std::size_t i = 0; i < n; ++i) m(i, i) += static_cast<double>(n) + 1.0;
  return m;
}

inline Matrix ref_mul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline double ref_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double rel_diff(const Matrix& ref, const Matrix& x) {
  const double r = ref_norm(ref);
  const double d = ref_norm(x - ref);
  return r > 0.0 ? d / r : d;
}

inline Matrix ref_pow(const Matrix& a, std::uint64_t e) {
  Matrix r = Matrix::identity(a.rows());
  for (std::uint64_t i = 0; i < e; ++i) r = ref_mul(r, a);
  return r;
}

/// I + X + ... + X^d by Horner: ((X + I) X + I) ...
inline Matrix horner_geometric(const Matrix& x, std::uint64_t d) {
  const std::size_t n = x.rows();
  Matrix acc = Matrix::identity(n);
  for (std::uint64_t i = 0; i < d; ++i) {
    acc = ref_mul(acc, x);
    for (std::size_t j = 0; j < n; ++j) acc(j, j) += 1.0;
  }
  return acc;
}

/// Gauss-Jordan inverse with partial pivoting.
inline Matrix ref_inverse(Matrix a) {
  const std::size_t n = a.rows();
  Matrix inv = Matrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(c, j), a(piv, j));
      std::swap(inv(c, j), inv(piv, j));
    }
    const double d = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= d;
      inv(c, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

/// A Newton step for the p-th root written out with the reference helpers:
/// X+ = ((p-1) X + A X^{1-p}) / p.
inline Matrix ref_newton_step(const Matrix& a, const Matrix& x, int p) {
  const Matrix t = ref_mul(a, ref_inverse(ref_pow(x, static_cast<std::uint64_t>(p - 1))));
  return ((p - 1.0) / p) * x + (1.0 / p) * t;
}

}  // namespace proot::testing
