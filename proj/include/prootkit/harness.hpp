#pragma once

// Experiment plumbing shared by the CLI and the acceptance suite: where test
// matrices come from, and the multi-method benchmark with its summary table.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prootkit/costmodel.hpp"
#include "prootkit/iterations.hpp"
#include "prootkit/matrix.hpp"

namespace proot {

struct MmFileSource {
  std::filesystem::path path;
};
struct RandomSpdSource {
  std::size_t n = 1;
  double cond_target = 1.0;
  std::uint64_t seed = 0;
};
struct DiagSource {
  std::vector<double> entries;
};
struct IdentitySource {
  std::size_t n = 1;
};

using MatrixSource = std::variant<MmFileSource, RandomSpdSource, DiagSource, IdentitySource>;

/// identity:N | diag:v1,v2,... | random-spd:N,COND,SEED | mm:PATH | PATH
MatrixSource parse_source(std::string_view spec);
std::string describe(const MatrixSource& source);
Matrix load_matrix(const MatrixSource& source);

/// Q D Q^T with Q from the QR factorization of a seeded Gaussian matrix and
/// D log-uniform in [1/cond_target, 1]. For n >= 2 the extreme eigenvalues
/// are pinned to 1/cond_target and 1, so the 2-norm condition number is
/// cond_target up to rounding.
Matrix gen_random_spd(std::size_t n, double cond_target, std::uint64_t seed);

struct BenchOptions {
  int p = 59;
  std::vector<MethodTag> methods{MethodTag::IN, MethodTag::Variant, MethodTag::Iter39};
  int repeats = 1;
  StoppingRule stop;
  bool precondition = true;
  std::string label;
};

struct BenchMethodResult {
  MethodTag method = MethodTag::IN;
  ConvergenceReport report;       // from the fastest repeat
  double total_wall_ms = 0.0;     // fastest repeat, iteration steps only
  std::optional<double> recovered_residual;  // vs the original A when preconditioned
  std::uint64_t matmuls = 0;
  std::uint64_t lus = 0;
  double flop_estimate = 0.0;
  Rational per_iter_coeff;        // counted n^3 coefficient per iteration
  std::optional<std::string> failure;
};

struct BenchSummary {
  int p = 0;
  std::size_t n = 0;
  std::string label;
  std::vector<BenchMethodResult> methods;

  const BenchMethodResult* find(MethodTag m) const;
};

/// Runs every requested method on the same (optionally preconditioned) matrix.
/// Method failures are recorded in the summary rather than thrown.
BenchSummary run_bench(const Matrix& a, const BenchOptions& options);

void write_summary_csv(std::ostream& out, const BenchSummary& summary);

/// CSV behind the cost comparison: coefficients as exact fractions plus a
/// flag telling whether the variant matches 2*floor(2 log2(p-1)) + 8/3.
void write_cost_csv(std::ostream& out, const std::vector<CostRow>& rows);

}  // namespace proot
