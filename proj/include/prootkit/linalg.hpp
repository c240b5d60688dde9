#pragma once

#include <cstdint>

#include "prootkit/matrix.hpp"

namespace proot {

/// Dense product. Counted as one multiplication when both operands are the
/// same square size; other shapes are computed but not charged.
Matrix matmul(const Matrix& a, const Matrix& b, OpCounter& counter);

/// numerator * denominator^{-1} through a partially pivoted LU of the
/// denominator. Throws SingularMatrixError when a pivot drops below
/// 1e-14 * ||denominator||_F. Charged as one LU division.
Matrix lu_solve_right(const Matrix& numerator, const Matrix& denominator, OpCounter& counter);

/// denominator^{-1} * numerator, computed as a right division of transposes.
/// Charged as one LU division.
Matrix lu_solve_left(const Matrix& denominator, const Matrix& numerator, OpCounter& counter);

double frob_norm(const Matrix& a);

/// alpha*a + beta*b + gamma*I. Free of charge.
Matrix axpy_affine(double alpha, const Matrix& a, double beta, const Matrix& b, double gamma);

/// a^e by left-to-right binary powering. e == 0 gives the identity.
/// Uses binary_power_cost(e) counted multiplications.
Matrix power_naive(const Matrix& a, std::uint64_t e, OpCounter& counter);

/// Multiplications used by power_naive: floor(log2 e) squarings plus
/// popcount(e) - 1 extra products; zero for e <= 1.
std::uint64_t binary_power_cost(std::uint64_t e);

/// ||a - b||_F / ||a||_F, or ||a - b||_F when a is zero.
double relative_diff(const Matrix& a, const Matrix& b);

}  // namespace proot
