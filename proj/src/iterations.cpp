#include "prootkit/iterations.hpp"

#include <chrono>
#include <sstream>

#include "prootkit/linalg.hpp"

namespace proot {

std::string_view to_string(MethodTag m) {
  switch (m) {
    case MethodTag::Plain: return "plain";
    case MethodTag::IN: return "in";
    case MethodTag::Iter39: return "iter39";
    case MethodTag::Coupled: return "coupled";
    case MethodTag::Variant: return "variant";
  }
  return "?";
}

MethodTag parse_method(std::string_view name) {
  for (MethodTag m : kAllMethods)
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected plain|in|iter39|coupled|variant)");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Residual: return "residual";
    case StopReason::Increment: return "increment";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::Breakdown: return "breakdown";
  }
  return "?";
}

IterationState initial_state(const Matrix& a, int p, MethodTag method) {
  if (!a.square()) throw DimensionError("initial_state: matrix not square");
  if (p < 2) throw std::invalid_argument("initial_state: p must be at least 2");
  const std::size_t n = a.rows();
  IterationState s;
  s.p = p;
  s.method = method;
  s.x = Matrix::identity(n);
  switch (method) {
    case MethodTag::Plain: s.aux = Matrix::zeros(n); break;
    case MethodTag::Coupled: s.aux = a; break;
    default: s.aux = axpy_affine(1.0 / p, a, 0.0, a, -1.0 / p); break;
  }
  return s;
}

IterationState step_plain(const Matrix& a, const IterationState& state, OpCounter& counter) {
  const int p = state.p;
  const Matrix xp = power_naive(state.x, static_cast<std::uint64_t>(p - 1), counter);
  const Matrix t = lu_solve_right(a, xp, counter);
  IterationState next{state.k + 1, p, axpy_affine((p - 1.0) / p, state.x, 1.0 / p, t, 0.0),
                      state.aux, state.method};
  return next;
}

IterationState step_in(const IterationState& state, OpCounter& counter) {
  const int p = state.p;
  const Matrix& h = state.aux;
  Matrix x1 = state.x + h;
  const Matrix f = lu_solve_right(state.x, x1, counter);
  const Matrix g = lu_solve_right(h, x1, counter);  // H X+^{-1}
  // H X+^{-1} sum_i (i+1) F^i, Horner in F from the right
  Matrix t = (p - 1.0) * g;
  for (int i = p - 3; i >= 0; --i) {
    t = matmul(t, f, counter);
    t = axpy_affine(1.0, t, i + 1.0, g, 0.0);
  }
  Matrix h1 = (-1.0 / p) * matmul(t, h, counter);
  return {state.k + 1, p, std::move(x1), std::move(h1), state.method};
}

IterationState step_iter39(const IterationState& state, OpCounter& counter) {
  const int p = state.p;
  Matrix x1 = state.x + state.aux;
  const Matrix f = lu_solve_right(state.x, x1, counter);
  const Matrix fpm1 = power_naive(f, static_cast<std::uint64_t>(p - 1), counter);
  const Matrix d = matmul(fpm1, axpy_affine(1.0, f, 0.0, f, -1.0), counter);  // F^{p-1}(F-I)
  const Matrix fp = d + fpm1;
  const Matrix inner = axpy_affine(-1.0 / p, fp, 1.0, d, 1.0 / p);
  // the leading factor must be X_{k+1}; with X_k the iteration leaves the Newton
  // sequence after the first step and stalls away from the root
  Matrix h1 = -1.0 * matmul(x1, inner, counter);
  return {state.k + 1, p, std::move(x1), std::move(h1), state.method};
}

IterationState step_coupled(const IterationState& state, OpCounter& counter) {
  const int p = state.p;
  const Matrix& nk = state.aux;
  const Matrix m = axpy_affine(1.0 / p, nk, 0.0, nk, (p - 1.0) / p);
  Matrix x1 = matmul(state.x, m, counter);
  const Matrix mp = power_naive(m, static_cast<std::uint64_t>(p), counter);
  Matrix n1 = lu_solve_left(mp, nk, counter);
  return {state.k + 1, p, std::move(x1), std::move(n1), state.method};
}

IterationState step_variant(const IterationState& state, const EvalPlan& plan,
                            OpCounter& counter) {
  const int p = state.p;
  if (plan.degree != static_cast<std::uint64_t>(p - 2)) {
    std::ostringstream msg;
    msg << "step_variant: plan degree " << plan.degree << " does not match p - 2 = " << p - 2;
    throw std::invalid_argument(msg.str());
  }
  Matrix x1 = state.x + state.aux;
  const Matrix f = lu_solve_right(state.x, x1, counter);
  const Matrix poly = eval_plan(plan, f, counter);
  const Matrix lead = axpy_affine(-(p - 1.0), f, 0.0, f, static_cast<double>(p));
  Matrix brace = matmul(lead, poly, counter);
  for (std::size_t i = 0; i < brace.rows(); ++i) brace(i, i) -= (p - 1.0);
  Matrix h1 = (-1.0 / p) * matmul(brace, state.aux, counter);
  return {state.k + 1, p, std::move(x1), std::move(h1), state.method};
}

Stepper::Stepper(Matrix a, int p, MethodTag method)
    : a_(std::move(a)), state_(initial_state(a_, p, method)) {
  if (method == MethodTag::Variant) plan_ = build_plan(static_cast<std::uint64_t>(p - 2));
}

void Stepper::advance(OpCounter& counter) {
  switch (state_.method) {
    case MethodTag::Plain: state_ = step_plain(a_, state_, counter); break;
    case MethodTag::IN: state_ = step_in(state_, counter); break;
    case MethodTag::Iter39: state_ = step_iter39(state_, counter); break;
    case MethodTag::Coupled: state_ = step_coupled(state_, counter); break;
    case MethodTag::Variant: state_ = step_variant(state_, *plan_, counter); break;
  }
}

double relative_residual(const Matrix& x, const Matrix& a, int p) {
  OpCounter scratch;
  const Matrix xp = power_naive(x, static_cast<std::uint64_t>(p), scratch);
  const double na = frob_norm(a);
  const double r = frob_norm(xp - a);
  return na > 0.0 ? r / na : r;
}

double ConvergenceReport::total_wall_ms() const {
  double t = 0.0;
  for (const auto& r : rows) t += r.wall_ms;
  return t;
}

RunResult run(const Matrix& a, int p, MethodTag method, const StoppingRule& stop,
              OpCounter& counter, std::string label) {
  Stepper stepper(a, p, method);
  ConvergenceReport report;
  report.method = method;
  report.p = p;
  report.n = a.rows();
  report.label = std::move(label);

  auto snapshot = [&](std::uint64_t k, double residual, double inc, double ms) {
    report.rows.push_back(ReportRow{k, residual, inc, ms, counter.matmul_count(),
                                    counter.lu_count(), counter.flop_estimate()});
  };

  snapshot(0, relative_residual(stepper.state().x, a, p), 0.0, 0.0);
  if (report.rows.back().residual <= stop.tol) {
    report.stop = StopReason::Residual;
    return {stepper.state().x, std::move(report)};
  }

  using Clock = std::chrono::steady_clock;
  for (std::uint64_t k = 0; k < stop.max_iter; ++k) {
    const Matrix previous = stepper.state().x;
    const auto t0 = Clock::now();
    try {
      stepper.advance(counter);
    } catch (const SingularMatrixError& e) {
      report.stop = StopReason::Breakdown;
      std::ostringstream msg;
      msg << to_string(method) << " iteration " << k << ": " << e.what();
      throw BreakdownError(msg.str(), std::move(report), k);
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    const Matrix& x = stepper.state().x;
    const double inc = relative_diff(previous, x);
    const double residual = relative_residual(x, a, p);
    snapshot(k + 1, residual, inc, ms);

    if (residual <= stop.tol) {
      report.stop = StopReason::Residual;
      return {x, std::move(report)};
    }
    if (inc <= stop.h_tol) {
      report.stop = StopReason::Increment;
      return {x, std::move(report)};
    }
  }
  report.stop = StopReason::MaxIter;
  std::ostringstream msg;
  msg << to_string(method) << ": no convergence after " << stop.max_iter
      << " iterations (last residual " << report.final_residual() << ")";
  throw ConvergenceError(msg.str(), std::move(report));
}

}  // namespace proot
