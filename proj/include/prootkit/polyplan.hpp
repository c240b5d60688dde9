#pragma once

// Straight-line programs for the geometric polynomial
//   P_d(X) = I + X + X^2 + ... + X^d
// built by repeatedly halving the degree:
//   P_d(X) = P_{(d-1)/2}(X^2) (X + I)         d odd
//   P_d(X) = P_{(d-2)/2}(X^2) (X^2 + X) + I   d even
// with P_1 = X + I and P_2 = X^2 + X + I as base cases. One squaring chain
// X, X^2, X^4, ... is shared by every level of the recursion.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "prootkit/matrix.hpp"

namespace proot {

using Slot = std::size_t;

/// Slot 0 holds the argument X; every step writes a fresh slot.
struct SquareStep {
  Slot src;
};

struct ProductStep {
  Slot lhs;
  Slot rhs;
};

struct AffineStep {
  std::vector<std::pair<double, Slot>> terms;
  double identity_coef = 0.0;
};

struct Step {
  std::variant<SquareStep, ProductStep, AffineStep> kind;
  Slot dst;

  bool is_multiplication() const { return !std::holds_alternative<AffineStep>(kind); }
};

struct EvalPlan {
  std::uint64_t degree = 0;
  std::vector<Step> steps;
  Slot result_slot = 0;
  std::uint64_t matmul_cost = 0;

  std::size_t slot_count() const { return steps.size() + 1; }
  std::size_t square_count() const;
};

/// d == 0 yields the one-step plan for P_0 = I.
EvalPlan build_plan(std::uint64_t d);

/// P_d(x). Charges exactly plan.matmul_cost multiplications.
Matrix eval_plan(const EvalPlan& plan, const Matrix& x, OpCounter& counter);

/// (p, multiplications per variant iteration) for p in [p_min, p_max]:
/// the polynomial's cost for d = p - 2 plus the two outer products.
std::vector<std::pair<int, std::uint64_t>> plan_cost_table(int p_min, int p_max);

/// Factored form of the plan, e.g. {[(X^32+X^16+I)(X^16+X^8)+I][X^4+I][X^4+X^2]+I}{X+I}
/// for d = 57. Innermost products use (), the next level [], then {}.
std::string render_factored(const EvalPlan& plan);

}  // namespace proot
