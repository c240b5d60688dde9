#include "prootkit/costmodel.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

#include "prootkit/linalg.hpp"
#include "prootkit/polyplan.hpp"

namespace proot {

namespace {

std::string formula(std::uint64_t divisions, const Rational& coeff) {
  // the division tail is written the usual way: 8/3 for one, 10/3 for two, ...
  const Rational tail(static_cast<std::int64_t>(2 * divisions + 6), 3);
  if (divisions == 0) return "(" + to_string(coeff) + ")n^3";
  std::ostringstream s;
  s << '(' << to_string(coeff - tail) << '+' << to_string(tail) << ")n^3";
  return s.str();
}

// Deterministic, well-conditioned SPD matrix with spectrum inside (0, 1].
Matrix probe_matrix(std::size_t n) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = (i == j ? 0.5 : 0.0) + 0.2 / static_cast<double>(n * (1 + (i > j ? i - j : j - i)));
  return a;
}

}  // namespace

CostEntry cost_entry(MethodTag method, int p) {
  if (p < 2) throw std::invalid_argument("cost_entry: p must be at least 2");
  const auto up = static_cast<std::uint64_t>(p);
  CostEntry e;
  e.method = method;
  e.p = p;
  switch (method) {
    case MethodTag::Plain:
      e.products = binary_power_cost(up - 1);
      e.divisions = 1;
      break;
    case MethodTag::IN:
      e.products = up - 1;
      e.divisions = 2;
      break;
    case MethodTag::Iter39:
      e.products = binary_power_cost(up - 1) + 2;
      e.divisions = 1;
      break;
    case MethodTag::Coupled:
      e.products = binary_power_cost(up) + 1;
      e.divisions = 1;
      break;
    case MethodTag::Variant:
      e.products = build_plan(up - 2).matmul_cost + 2;
      e.divisions = 1;
      break;
  }
  e.cubic_coeff = Rational(static_cast<std::int64_t>(2 * e.products)) +
                  Rational(static_cast<std::int64_t>(8 * e.divisions), 3);
  e.formula_text = formula(e.divisions, e.cubic_coeff);
  return e;
}

Rational cost_law(int p) {
  if (p < 3) throw std::invalid_argument("cost_law: p must be at least 3");
  // floor(2 log2 m) is the largest t with 2^t <= m^2
  const auto m = static_cast<std::uint64_t>(p - 1);
  const auto t = static_cast<std::int64_t>(std::bit_width(m * m) - 1);
  return Rational(2 * t) + Rational(8, 3);
}

std::vector<CostRow> cost_curve(int p_min, int p_max) {
  if (p_min < 5 || p_max < p_min) {
    throw std::invalid_argument("cost_curve: need 5 <= p_min <= p_max");
  }
  std::vector<CostRow> rows;
  for (int p = p_min; p <= p_max; ++p) {
    CostRow r;
    r.p = p;
    r.in = cost_entry(MethodTag::IN, p).cubic_coeff;
    r.variant = cost_entry(MethodTag::Variant, p).cubic_coeff;
    r.iter39 = cost_entry(MethodTag::Iter39, p).cubic_coeff;
    r.law = cost_law(p);
    r.law_agrees = r.law == r.variant;
    rows.push_back(r);
  }
  return rows;
}

bool validate_counts(std::size_t n, int p, MethodTag method, std::string* diff) {
  Stepper stepper(probe_matrix(n), p, method);
  OpCounter counter;
  stepper.advance(counter);

  const CostEntry model = cost_entry(method, p);
  const Rational counted = Rational(static_cast<std::int64_t>(2 * counter.matmul_count())) +
                           Rational(static_cast<std::int64_t>(8 * counter.lu_count()), 3);
  const auto n3 = static_cast<std::uint64_t>(n) * n * n;
  const bool flops_consistent = counter.flop_thirds() == n3 * (6 * counter.matmul_count() +
                                                               8 * counter.lu_count());
  const bool ok = counted == model.cubic_coeff && counter.matmul_count() == model.products &&
                  counter.lu_count() == model.divisions && flops_consistent;
  if (!ok && diff) {
    std::ostringstream s;
    s << to_string(method) << " p=" << p << " n=" << n << ": counted " << counter.matmul_count()
      << " products + " << counter.lu_count() << " divisions = " << to_string(counted)
      << " n^3; modeled " << model.products << " + " << model.divisions << " = "
      << to_string(model.cubic_coeff) << " n^3";
    if (!flops_consistent) s << "; flop estimate inconsistent with counts";
    *diff = s.str();
  }
  return ok;
}

}  // namespace proot
