// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "prootkit/costmodel.hpp"
#include "prootkit/harness.hpp"
#include "prootkit/iterations.hpp"
#include "prootkit/linalg.hpp"
#include "prootkit/polyplan.hpp"
#include "prootkit/precondition.hpp"
#include "support.hpp"

using namespace proot;
using namespace proot::testing;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// floor(2 log2 x) as the largest k with 2^k <= x^2, in integers
int floor_two_log2(std::uint64_t x) {
  const std::uint64_t sq = x * x;
  int k = 0;
  while ((std::uint64_t{1} << (k + 1)) <= sq) ++k;
  return k;
}

Rational counted_coeff(const OpCounter& c, std::size_t n) {
  const auto n3 = static_cast<std::int64_t>(n * n * n);
  return Rational(static_cast<std::int64_t>(c.flop_thirds()), 3 * n3);
}

void decomposition_count() {
  const EvalPlan plan = build_plan(57);
  verdict(1, plan.matmul_cost == 9, "decomposition count d=57",
          std::to_string(plan.matmul_cost) + " multiplications, " + render_factored(plan));
}

void cost_law_criterion() {
  std::vector<int> bad;
  std::ostringstream detail;
  for (const auto& [p, cost] : plan_cost_table(5, 100)) {
    const int law = floor_two_log2(static_cast<std::uint64_t>(p - 1));
    if (static_cast<int>(cost) != law) {
      bad.push_back(p);
      detail << " p=" << p << " (" << cost << " vs " << law << ")";
    }
  }
  std::string text = bad.empty() ? "all 96 values of p agree"
                                 : std::to_string(bad.size()) + " of 96 disagree:" + detail.str();
  verdict(2, bad.empty(), "cost law m(P_{p-2})+2 == floor(2 log2(p-1)), p in [5,100]", text);
}

void table_two() {
  const int p = 59;
  const std::size_t n = 8;
  const Rational want_in = Rational(118) + Rational(10, 3);
  const Rational want_variant = Rational(22) + Rational(8, 3);
  const Rational want_iter39 = Rational(20) + Rational(8, 3);
  OpCounter scratch;
  const Matrix a = precondition(gen_random_spd(n, 10.0, 59), p, scratch).a_tilde;
  const EvalPlan plan = build_plan(p - 2);

  auto counted = [&](MethodTag m) {
    OpCounter c;
    const IterationState s = initial_state(a, p, m);
    switch (m) {
      case MethodTag::IN: step_in(s, c); break;
      case MethodTag::Iter39: step_iter39(s, c); break;
      default: step_variant(s, plan, c); break;
    }
    return counted_coeff(c, n);
  };
  const Rational in_c = counted(MethodTag::IN);
  const Rational var_c = counted(MethodTag::Variant);
  const Rational it_c = counted(MethodTag::Iter39);
  const Rational in_m = cost_entry(MethodTag::IN, p).cubic_coeff;
  const Rational var_m = cost_entry(MethodTag::Variant, p).cubic_coeff;
  const Rational it_m = cost_entry(MethodTag::Iter39, p).cubic_coeff;
  const double ratio = boost::rational_cast<double>(var_c / in_c);

  const bool ok = in_c == want_in && in_m == want_in && var_c == want_variant &&
                  var_m == want_variant && it_c == want_iter39 && it_m == want_iter39 &&
                  std::abs(ratio - 0.203) < 5e-4;
  std::ostringstream d;
  d << "in " << to_string(in_c) << " (model " << to_string(in_m) << "), variant "
    << to_string(var_c) << " (model " << to_string(var_m) << "), iter39 " << to_string(it_c)
    << " (model " << to_string(it_m) << "), variant/in " << ratio;
  verdict(3, ok, "per-iteration coefficients at p=59", d.str());
}

void method_equivalence() {
  double worst_x = 0.0;
  double worst_h = 0.0;
  double worst_h_abs = 0.0;  // gap measured against ||X_k|| instead of ||H_k||
  std::ostringstream first_h;
  int h_bad = 0;
  int h_total = 0;
  // largest k for which the increments agree at every seed, per p
  std::ostringstream h_reach;
  for (int p : {5, 13, 59}) {
    int reach = 8;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      OpCounter scratch;
      const Matrix a = precondition(gen_random_spd(6, 380.0, 1000 + seed), p, scratch).a_tilde;
      std::vector<Stepper> steppers;
      for (MethodTag m : kAllMethods) steppers.emplace_back(a, p, m);
      const auto in_idx = 1;
      const auto var_idx = 4;
      for (int k = 1; k <= 8; ++k) {
        OpCounter c;
        for (auto& s : steppers) s.advance(c);
        for (std::size_t i = 0; i < steppers.size(); ++i)
          for (std::size_t j = i + 1; j < steppers.size(); ++j)
            worst_x = std::max(worst_x,
                               rel_diff(steppers[i].state().x, steppers[j].state().x));
        const double dh = rel_diff(steppers[in_idx].state().aux, steppers[var_idx].state().aux);
        worst_h = std::max(worst_h, dh);
        worst_h_abs = std::max(worst_h_abs, ref_norm(steppers[in_idx].state().aux -
                                                     steppers[var_idx].state().aux) /
                                                ref_norm(steppers[in_idx].state().x));
        ++h_total;
        if (!(dh <= 1e-12)) {
          if (h_bad == 0) first_h << "p=" << p << " seed " << seed << " k=" << k << " (" << sci(dh) << ")";
          ++h_bad;
          reach = std::min(reach, k - 1);
        }
      }
    }
    h_reach << (p == 5 ? "" : ", ") << "p=" << p << ": k<=" << reach;
  }
  std::ostringstream d;
  d << "worst pairwise X diff " << sci(worst_x) << " (limit 1e-9); worst variant/in H diff "
    << sci(worst_h) << " (limit 1e-12)";
  if (h_bad > 0) {
    d << ", " << h_bad << " of " << h_total << " H comparisons over the limit, first at "
      << first_h.str() << "; H agrees through " << h_reach.str()
      << "; largest gap relative to ||X_k|| " << sci(worst_h_abs);
  }
  verdict(4, worst_x <= 1e-9 && h_bad == 0, "method equivalence, 10 seeds n=6, p in {5,13,59}",
          d.str());
}

BenchSummary benchmark_n100() {
  BenchOptions opts;
  opts.p = 59;
  opts.methods = {MethodTag::IN, MethodTag::Variant, MethodTag::Iter39};
  opts.repeats = 5;
  opts.label = "random-spd:100,380,42";
  return run_bench(gen_random_spd(100, 380.0, 42), opts);
}

void convergence(const BenchSummary& s) {
  bool ok = true;
  double lo = 1e300, hi = 0.0;
  std::ostringstream d;
  for (const auto& m : s.methods) {
    const double r = m.report.final_residual();
    ok = ok && !m.failure && r <= 1e-12;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    d << to_string(m.method) << " R=" << sci(r) << " in " << m.report.iterations() << " its";
    if (m.failure) d << " (" << *m.failure << ")";
    d << ", ";
  }
  const bool spread_ok = hi <= 10.0 * std::max(lo, 1e-300);
  d << "max/min " << (lo > 0 ? hi / lo : 0.0);
  verdict(5, ok && spread_ok, "convergence, random SPD n=100 cond 380, p=59", d.str());
}

void timing(const BenchSummary& s) {
  const auto* in = s.find(MethodTag::IN);
  const auto* var = s.find(MethodTag::Variant);
  const auto* it = s.find(MethodTag::Iter39);
  const double r_in = var->total_wall_ms / in->total_wall_ms;
  const double r_it = var->total_wall_ms / it->total_wall_ms;
  std::ostringstream d;
  d << "in " << in->total_wall_ms << " ms, variant " << var->total_wall_ms << " ms, iter39 "
    << it->total_wall_ms << " ms (fastest of 5); variant/in " << r_in << ", variant/iter39 "
    << r_it;
  verdict(6, r_in >= 0.15 && r_in <= 0.45 && r_it >= 0.9, "timing ratios on the n=100 benchmark",
          d.str());
}

void stability() {
  OpCounter scratch;
  const Matrix a = precondition(gen_random_spd(100, 380.0, 42), 59, scratch).a_tilde;
  Stepper st(a, 59, MethodTag::Variant);
  const StoppingRule rule;
  double converged = relative_residual(st.state().x, a, 59);
  for (std::uint64_t k = 0; k < rule.max_iter; ++k) {
    const Matrix prev = st.state().x;
    OpCounter c;
    st.advance(c);
    converged = relative_residual(st.state().x, a, 59);
    if (converged <= rule.tol || relative_diff(prev, st.state().x) <= rule.h_tol) break;
  }
  const std::uint64_t at = st.state().k;
  double worst = converged;
  for (int extra = 0; extra < 20; ++extra) {
    OpCounter c;
    st.advance(c);
    worst = std::max(worst, relative_residual(st.state().x, a, 59));
  }
  std::ostringstream d;
  d << "converged at k=" << at << " with R=" << sci(converged) << ", worst over 20 more "
    << sci(worst) << " (x" << worst / converged << ")";
  verdict(7, worst <= 10.0 * converged, "stability of the variant after convergence", d.str());
}

void coupled_invariant() {
  OpCounter scratch;
  const int p = 7;
  const Matrix a = precondition(gen_random_spd(20, 380.0, 8), p, scratch).a_tilde;
  Stepper st(a, p, MethodTag::Coupled);
  const double na = ref_norm(a);
  double worst = 0.0;
  std::uint64_t steps = 0;
  for (; steps < 100; ++steps) {
    OpCounter c;
    st.advance(c);
    const Matrix expect = ref_mul(ref_inverse(ref_pow(st.state().x, p)), a);
    worst = std::max(worst, ref_norm(st.state().aux - expect) / na);
    if (relative_residual(st.state().x, a, p) <= 1e-13) {
      ++steps;
      break;
    }
  }
  verdict(8, worst <= 1e-9, "coupled invariant, p=7 n=20",
          "max ||N_k - X_k^-p A||/||A|| = " + sci(worst) + " over " + std::to_string(steps) +
              " steps");
}

void polynomial_oracle() {
  double worst = 0.0;
  std::uint64_t worst_d = 0;
  for (std::uint64_t d = 0; d <= 100; ++d) {
    const EvalPlan plan = build_plan(d);
    for (std::uint64_t s = 0; s < 20; ++s) {
      Matrix x = random_matrix(4, -1, 1, 7919 * d + s);
      x *= 0.95 / ref_norm(x);
      OpCounter c;
      const double e = rel_diff(horner_geometric(x, d), eval_plan(plan, x, c));
      if (e > worst) {
        worst = e;
        worst_d = d;
      }
    }
  }
  verdict(9, worst <= 1e-11, "polynomial plans vs Horner, d in [0,100]",
          "worst relative error " + sci(worst) + " at d=" + std::to_string(worst_d));
}

void round_trip() {
  bool ok = true;
  std::ostringstream d;
  for (int p : {3, 59}) {
    const Matrix a = gen_random_spd(50, 380.0, 50 + static_cast<std::uint64_t>(p));
    OpCounter c;
    const PreconditionedProblem pp = precondition(a, p, c);
    const RunResult r = run(pp.a_tilde, p, MethodTag::Variant, {}, c);
    const Matrix x = recover_root(pp, r.x);
    const double res = ref_norm(ref_pow(x, static_cast<std::uint64_t>(p)) - a) / ref_norm(a);
    ok = ok && res <= 1e-9;
    d << (p == 3 ? "" : ", ") << "p=" << p << " R=" << sci(res);
  }
  verdict(10, ok, "preconditioning round trip, n=50", d.str());
}

template <class F>
void guarded(int id, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    verdict(id, false, "criterion raised", e.what());
  }
}

}  // namespace

int main() {
  guarded(1, decomposition_count);
  guarded(2, cost_law_criterion);
  guarded(3, table_two);
  guarded(4, method_equivalence);
  BenchSummary bench;
  bool have_bench = false;
  guarded(5, [&] {
    bench = benchmark_n100();
    have_bench = true;
    convergence(bench);
  });
  if (have_bench) guarded(6, [&] { timing(bench); });
  else verdict(6, false, "timing ratios on the n=100 benchmark", "benchmark did not run");
  guarded(7, stability);
  guarded(8, coupled_invariant);
  guarded(9, polynomial_oracle);
  guarded(10, round_trip);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
