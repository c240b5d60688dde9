#include "prootkit/linalg.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <vector>

#include "prootkit/kernels.hpp"

namespace proot {

namespace {

#ifdef PROOTKIT_WITH_OPENMP
namespace kern = kernels::omp;
#else
namespace kern = kernels::serial;
#endif

constexpr double kPivotTolerance = 1e-14;

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b, OpCounter& counter) {
  if (a.cols() != b.rows()) {
    std::ostringstream msg;
    msg << "matmul: inner dimensions differ (" << a.rows() << "x" << a.cols() << " * "
        << b.rows() << "x" << b.cols() << ")";
    throw DimensionError(msg.str());
  }
  Matrix c(a.rows(), b.cols());
  kern::matmul(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  if (a.square() && b.square()) counter.add_matmul(a.rows());
  return c;
}

Matrix lu_solve_right(const Matrix& numerator, const Matrix& denominator, OpCounter& counter) {
  if (!denominator.square()) throw DimensionError("lu_solve_right: denominator not square");
  if (numerator.cols() != denominator.rows()) {
    throw DimensionError("lu_solve_right: numerator columns differ from denominator size");
  }
  const std::size_t n = denominator.rows();
  Matrix lu = denominator;
  std::vector<std::size_t> perm(n);
  const double threshold = kPivotTolerance * frob_norm(denominator);
  if (auto bad = kern::lu_factor(lu.data(), perm, n, threshold)) {
    std::ostringstream msg;
    msg << "lu_solve_right: matrix is singular to working precision (pivot " << *bad << ")";
    throw SingularMatrixError(*bad, msg.str());
  }
  Matrix f = numerator;
  kern::solve_right(lu.data(), perm, f.data(), f.rows(), n);
  counter.add_lu(n);
  return f;
}

Matrix lu_solve_left(const Matrix& denominator, const Matrix& numerator, OpCounter& counter) {
  return lu_solve_right(numerator.transpose(), denominator.transpose(), counter).transpose();
}

double frob_norm(const Matrix& a) {
  // scaled accumulation so huge or tiny entries do not overflow/underflow
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : a.data()) {
    if (v == 0.0) continue;
    const double av = std::abs(v);
    if (scale < av) {
      ssq = 1.0 + ssq * (scale / av) * (scale / av);
      scale = av;
    } else {
      ssq += (av / scale) * (av / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

Matrix axpy_affine(double alpha, const Matrix& a, double beta, const Matrix& b, double gamma) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("axpy_affine: operands differ in shape");
  }
  if (gamma != 0.0 && !a.square()) {
    throw DimensionError("axpy_affine: identity term needs a square shape");
  }
  Matrix out(a.rows(), a.cols());
  auto o = out.data();
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = alpha * x[i] + beta * y[i];
  if (gamma != 0.0)
    for (std::size_t i = 0; i < a.rows(); ++i) out(i, i) += gamma;
  return out;
}

std::uint64_t binary_power_cost(std::uint64_t e) {
  if (e <= 1) return 0;
  return static_cast<std::uint64_t>(std::bit_width(e) - 1) +
         static_cast<std::uint64_t>(std::popcount(e)) - 1;
}

Matrix power_naive(const Matrix& a, std::uint64_t e, OpCounter& counter) {
  if (!a.square()) throw DimensionError("power_naive: matrix not square");
  if (e == 0) return Matrix::identity(a.rows());
  Matrix result = a;
  for (int bit = std::bit_width(e) - 2; bit >= 0; --bit) {
    result = matmul(result, result, counter);
    if ((e >> bit) & 1u) result = matmul(result, a, counter);
  }
  return result;
}

double relative_diff(const Matrix& a, const Matrix& b) {
  const double den = frob_norm(a);
  const double num = frob_norm(a - b);
  return den > 0.0 ? num / den : num;
}

}  // namespace proot
