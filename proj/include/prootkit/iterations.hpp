#pragma once

// Newton-type iterations for the principal p-th root, all started from X_0 = I.
//
//   plain    X+ = ((p-1) X + A X^{1-p}) / p
//   in       X+ = X + H,  F = X X+^{-1},  H+ = -(1/p) H (sum_{i<=p-2} (i+1) X+^{-1} F^i) H
//   iter39   X+ = X + H,  F = X X+^{-1},  H+ = -X+ ((I - F^p)/p + F^{p-1}(F - I))
//   coupled  M = ((p-1) I + N)/p,  X+ = X M,  N+ = M^{-p} N
//   variant  X+ = X + H,  F = X X+^{-1},  H+ = -(1/p) {[-(p-1)F + pI] P_{p-2}(F) - (p-1)I} H
//
// The increment-based methods start from H_0 = (A - I)/p; coupled from N_0 = A.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prootkit/matrix.hpp"
#include "prootkit/polyplan.hpp"

namespace proot {

enum class MethodTag { Plain, IN, Iter39, Coupled, Variant };

inline constexpr MethodTag kAllMethods[] = {MethodTag::Plain, MethodTag::IN, MethodTag::Iter39,
                                            MethodTag::Coupled, MethodTag::Variant};

std::string_view to_string(MethodTag m);
/// Accepts plain|in|iter39|coupled|variant; throws std::invalid_argument otherwise.
MethodTag parse_method(std::string_view name);

struct IterationState {
  std::uint64_t k = 0;
  int p = 2;
  Matrix x;
  Matrix aux;  // H_k, N_k for coupled, zero for plain
  MethodTag method = MethodTag::IN;
};

IterationState initial_state(const Matrix& a, int p, MethodTag method);

IterationState step_plain(const Matrix& a, const IterationState& state, OpCounter& counter);
IterationState step_in(const IterationState& state, OpCounter& counter);
IterationState step_iter39(const IterationState& state, OpCounter& counter);
IterationState step_coupled(const IterationState& state, OpCounter& counter);
IterationState step_variant(const IterationState& state, const EvalPlan& plan,
                            OpCounter& counter);

/// Owns what one run needs (A, the polynomial plan) and advances a state.
class Stepper {
 public:
  Stepper(Matrix a, int p, MethodTag method);

  const IterationState& state() const noexcept { return state_; }
  const Matrix& target() const noexcept { return a_; }
  int p() const noexcept { return state_.p; }
  MethodTag method() const noexcept { return state_.method; }

  void advance(OpCounter& counter);

 private:
  Matrix a_;
  std::optional<EvalPlan> plan_;
  IterationState state_;
};

/// ||x^p - a||_F / ||a||_F. Not charged to any counter.
double relative_residual(const Matrix& x, const Matrix& a, int p);

struct StoppingRule {
  double tol = 1e-13;
  double h_tol = 1e-14;
  std::uint64_t max_iter = 100;
};

enum class StopReason { Residual, Increment, MaxIter, Breakdown };
std::string_view to_string(StopReason r);

struct ReportRow {
  std::uint64_t k = 0;
  double residual = 0.0;
  /// ||X_k - X_{k-1}||_F / ||X_{k-1}||_F, zero at k = 0
  double increment_norm = 0.0;
  double wall_ms = 0.0;
  std::uint64_t cum_matmuls = 0;
  std::uint64_t cum_lus = 0;
  double cum_flop_estimate = 0.0;
};

struct ConvergenceReport {
  MethodTag method = MethodTag::IN;
  int p = 2;
  std::size_t n = 0;
  std::string label;
  StopReason stop = StopReason::MaxIter;
  std::vector<ReportRow> rows;

  double total_wall_ms() const;
  std::uint64_t iterations() const { return rows.empty() ? 0 : rows.back().k; }
  double final_residual() const { return rows.empty() ? 0.0 : rows.back().residual; }
};

/// Base for failed runs; the report up to the failure is kept.
class RunFailure : public std::runtime_error {
 public:
  RunFailure(const std::string& what, ConvergenceReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const ConvergenceReport& report() const noexcept { return report_; }

 private:
  ConvergenceReport report_;
};

/// max_iter reached without the residual or increment test firing.
class ConvergenceError : public RunFailure {
 public:
  using RunFailure::RunFailure;
};

/// A division became singular; `iteration()` is the step that failed.
class BreakdownError : public RunFailure {
 public:
  BreakdownError(const std::string& what, ConvergenceReport report, std::uint64_t iteration)
      : RunFailure(what, std::move(report)), iteration_(iteration) {}
  std::uint64_t iteration() const noexcept { return iteration_; }

 private:
  std::uint64_t iteration_;
};

struct RunResult {
  Matrix x;
  ConvergenceReport report;
};

/// Iterates until `stop` fires. Residual evaluation is reporting overhead and
/// is neither timed nor counted.
RunResult run(const Matrix& a, int p, MethodTag method, const StoppingRule& stop,
              OpCounter& counter, std::string label = {});

}  // namespace proot
