#include "prootkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace proot::kernels::serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n) {
  std::fill(c.begin(), c.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c.data() + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double ail = a[i * k + l];
      const double* bl = b.data() + l * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += ail * bl[j];
    }
  }
}

std::optional<std::size_t> lu_factor(std::span<double> lu, std::span<std::size_t> perm,
                                     std::size_t n, double threshold) {
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu[i * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best >= threshold) || best == 0.0) return k;
    if (p != k) {
      std::swap_ranges(lu.begin() + k * n, lu.begin() + (k + 1) * n, lu.begin() + p * n);
      std::swap(perm[k], perm[p]);
    }
    const double* rk = lu.data() + k * n;
    const double inv = 1.0 / rk[k];
    for (std::size_t i = k + 1; i < n; ++i) {
      double* ri = lu.data() + i * n;
      const double l = ri[k] * inv;
      ri[k] = l;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
  return std::nullopt;
}

void solve_right(std::span<const double> lu, std::span<const std::size_t> perm,
                 std::span<double> rhs, std::size_t m, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t r = 0; r < m; ++r) {
    double* y = rhs.data() + r * n;
    // y U = rhs, forward over columns
    for (std::size_t j = 0; j < n; ++j) {
      const double* uj = lu.data() + j * n;
      y[j] /= uj[j];
      const double yj = y[j];
      for (std::size_t l = j + 1; l < n; ++l) y[l] -= yj * uj[l];
    }
    // g L = y, backward; L is unit lower
    for (std::size_t j = n; j-- > 0;) {
      const double* lj = lu.data() + j * n;
      const double gj = y[j];
      for (std::size_t l = 0; l < j; ++l) y[l] -= gj * lj[l];
    }
    // undo the row permutation: F = G P
    for (std::size_t i = 0; i < n; ++i) g[perm[i]] = y[i];
    std::copy(g.begin(), g.end(), y);
  }
}

}  // namespace proot::kernels::serial
