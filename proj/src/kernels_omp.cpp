#include "prootkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace proot::kernels::omp {

namespace {

constexpr std::size_t kBlock = 64;
// Below this many inner-loop updates a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n) {
  std::fill(c.begin(), c.end(), 0.0);
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  const auto row_blocks = static_cast<std::int64_t>((m + kBlock - 1) / kBlock);
  const bool par = m * k * n >= kParallelWork;

#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t ib = 0; ib < row_blocks; ++ib) {
    const std::size_t i0 = static_cast<std::size_t>(ib) * kBlock;
    const std::size_t i1 = std::min(m, i0 + kBlock);
    for (std::size_t l0 = 0; l0 < k; l0 += kBlock) {
      const std::size_t l1 = std::min(k, l0 + kBlock);
      for (std::size_t j0 = 0; j0 < n; j0 += kBlock) {
        const std::size_t j1 = std::min(n, j0 + kBlock);
        for (std::size_t i = i0; i < i1; ++i) {
          double* ci = pc + i * n;
          for (std::size_t l = l0; l < l1; ++l) {
            const double ail = pa[i * k + l];
            const double* bl = pb + l * n;
#pragma omp simd
            for (std::size_t j = j0; j < j1; ++j) ci[j] += ail * bl[j];
          }
        }
      }
    }
  }
}

std::optional<std::size_t> lu_factor(std::span<double> lu, std::span<std::size_t> perm,
                                     std::size_t n, double threshold) {
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double* p_lu = lu.data();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(p_lu[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(p_lu[i * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best >= threshold) || best == 0.0) return k;
    if (p != k) {
      std::swap_ranges(p_lu + k * n, p_lu + (k + 1) * n, p_lu + p * n);
      std::swap(perm[k], perm[p]);
    }
    const double* rk = p_lu + k * n;
    const double inv = 1.0 / rk[k];
    const auto lo = static_cast<std::int64_t>(k + 1);
    const auto hi = static_cast<std::int64_t>(n);
    const std::size_t rest = n - k - 1;
    const bool par = rest * rest >= kParallelWork;

#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t ii = lo; ii < hi; ++ii) {
      double* ri = p_lu + static_cast<std::size_t>(ii) * n;
      const double l = ri[k] * inv;
      ri[k] = l;
#pragma omp simd
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
  return std::nullopt;
}

void solve_right(std::span<const double> lu, std::span<const std::size_t> perm,
                 std::span<double> rhs, std::size_t m, std::size_t n) {
  const double* p_lu = lu.data();
  double* p_rhs = rhs.data();
  const bool par = m * n * n >= kParallelWork;

#pragma omp parallel if (par)
  {
    std::vector<double> g(n);
#pragma omp for schedule(static)
    for (std::int64_t rr = 0; rr < static_cast<std::int64_t>(m); ++rr) {
      double* y = p_rhs + static_cast<std::size_t>(rr) * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double* uj = p_lu + j * n;
        y[j] /= uj[j];
        const double yj = y[j];
#pragma omp simd
        for (std::size_t l = j + 1; l < n; ++l) y[l] -= yj * uj[l];
      }
      for (std::size_t j = n; j-- > 0;) {
        const double* lj = p_lu + j * n;
        const double gj = y[j];
#pragma omp simd
        for (std::size_t l = 0; l < j; ++l) y[l] -= gj * lj[l];
      }
      for (std::size_t i = 0; i < n; ++i) g[perm[i]] = y[i];
      std::copy(g.begin(), g.end(), y);
    }
  }
}

}  // namespace proot::kernels::omp
