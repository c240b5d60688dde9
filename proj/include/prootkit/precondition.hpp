#pragma once

#include "prootkit/iterations.hpp"
#include "prootkit/matrix.hpp"

namespace proot {

/// A mapped into the global-convergence region of the Newton iterations
/// started at I: a_tilde = A^{1/2} / ||A^{1/2}||_F.
struct PreconditionedProblem {
  Matrix a_tilde;
  double scale = 1.0;  // ||A^{1/2}||_F
  Matrix original;
  int p = 2;
};

/// Principal square root by coupled Newton (p = 2) applied to a / ||a||_F.
/// Throws ConvergenceError when the iteration stalls, which usually means the
/// spectrum of `a` touches the closed negative real axis.
Matrix sqrt_newton(const Matrix& a, OpCounter& counter);

PreconditionedProblem precondition(const Matrix& a, int p, OpCounter& counter);

/// A^{1/p} = scale^{2/p} * y^2 for y ~ a_tilde^{1/p}.
Matrix recover_root(const PreconditionedProblem& problem, const Matrix& y);

}  // namespace proot
