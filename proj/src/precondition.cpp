#include "prootkit/precondition.hpp"

#include <cmath>

#include "prootkit/linalg.hpp"

namespace proot {

namespace {

constexpr StoppingRule kSqrtStop{1e-14, 1e-14, 100};

}  // namespace

Matrix sqrt_newton(const Matrix& a, OpCounter& counter) {
  if (!a.square()) throw DimensionError("sqrt_newton: matrix not square");
  const double s = frob_norm(a);
  if (s == 0.0) throw std::invalid_argument("sqrt_newton: zero matrix has no principal root");
  const Matrix scaled = (1.0 / s) * a;
  try {
    RunResult r = run(scaled, 2, MethodTag::Coupled, kSqrtStop, counter, "sqrt");
    return std::sqrt(s) * std::move(r.x);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(
        std::string("sqrt_newton: square root iteration did not converge; the matrix may have "
                    "eigenvalues on the closed negative real axis (") +
            e.what() + ")",
        e.report());
  }
}

PreconditionedProblem precondition(const Matrix& a, int p, OpCounter& counter) {
  Matrix root = sqrt_newton(a, counter);
  const double c = frob_norm(root);
  return {(1.0 / c) * std::move(root), c, a, p};
}

Matrix recover_root(const PreconditionedProblem& problem, const Matrix& y) {
  OpCounter scratch;
  return std::pow(problem.scale, 2.0 / problem.p) * matmul(y, y, scratch);
}

}  // namespace proot
