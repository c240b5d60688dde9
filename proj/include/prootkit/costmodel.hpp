#pragma once

// Per-iteration n^3 coefficients, using the same accounting as OpCounter
// (2n^3 per product, 8/3 n^3 per LU division):
//
//   in       (p-1) products + 2 divisions      -> 2p + 10/3
//   variant  m(P_{p-2}) + 2 products + 1       -> 2(m + 2) + 8/3
//   iter39   b(p-1) + 2 products + 1           -> 59th root: 20 + 8/3
//   plain    b(p-1) products + 1
//   coupled  b(p) + 1 products + 1
//
// where b(e) is the binary powering cost and m(P_d) the plan cost.

#include <cstdint>
#include <string>
#include <vector>

#include "prootkit/iterations.hpp"
#include "prootkit/matrix.hpp"

namespace proot {

struct CostEntry {
  MethodTag method = MethodTag::IN;
  int p = 2;
  std::uint64_t products = 0;
  std::uint64_t divisions = 0;
  Rational cubic_coeff;
  std::string formula_text;  // e.g. "(118+10/3)n^3"
};

CostEntry cost_entry(MethodTag method, int p);

/// Closed form 2*floor(2 log2(p-1)) + 8/3, evaluated in integers.
Rational cost_law(int p);

struct CostRow {
  int p = 0;
  Rational in;
  Rational variant;
  Rational iter39;
  Rational law;
  bool law_agrees = false;
};

std::vector<CostRow> cost_curve(int p_min, int p_max);

/// Takes one instrumented step at size n and compares the counter's n^3
/// coefficient with cost_entry. On mismatch fills `diff` when given.
bool validate_counts(std::size_t n, int p, MethodTag method, std::string* diff = nullptr);

}  // namespace proot
