#pragma once

// Raw dense kernels on row-major buffers. `serial` is the reference
// implementation; `omp` is the OpenMP-parallel one the library dispatches to.
// Both expose identical signatures so tests and the benchmark can swap them.

#include <cstddef>
#include <optional>
#include <span>

namespace proot::kernels {

namespace serial {

/// c (m x n) = a (m x k) * b (k x n). `c` must not alias `a` or `b`.
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n);

/// In-place LU with partial pivoting of an n x n matrix, P*A = L*U with L unit
/// lower. `perm[i]` is the original row now in position i. Returns the failing
/// step when |pivot| < threshold.
std::optional<std::size_t> lu_factor(std::span<double> lu, std::span<std::size_t> perm,
                                     std::size_t n, double threshold);

/// Overwrites the m x n block `rhs` with rhs * A^{-1}, given the factors of A.
void solve_right(std::span<const double> lu, std::span<const std::size_t> perm,
                 std::span<double> rhs, std::size_t m, std::size_t n);

}  // namespace serial

namespace omp {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n);

std::optional<std::size_t> lu_factor(std::span<double> lu, std::span<std::size_t> perm,
                                     std::size_t n, double threshold);

void solve_right(std::span<const double> lu, std::span<const std::size_t> perm,
                 std::span<double> rhs, std::size_t m, std::size_t n);

/// Number of threads an OpenMP region would use (1 without OpenMP).
int max_threads();

}  // namespace omp

}  // namespace proot::kernels
