#include <doctest.h>

#include <cmath>

#include "prootkit/harness.hpp"
#include "prootkit/iterations.hpp"
#include "prootkit/linalg.hpp"
#include "prootkit/precondition.hpp"
#include "support.hpp"

using namespace proot;
using namespace proot::testing;

namespace {

Matrix preconditioned_spd(std::size_t n, double cond, std::uint64_t seed) {
  OpCounter c;
  return precondition(gen_random_spd(n, cond, seed), 2, c).a_tilde;
}

IterationState step_any(const Matrix& a, const IterationState& s, const EvalPlan& plan,
                        OpCounter& c) {
  switch (s.method) {
    case MethodTag::Plain: return step_plain(a, s, c);
    case MethodTag::IN: return step_in(s, c);
    case MethodTag::Iter39: return step_iter39(s, c);
    case MethodTag::Coupled: return step_coupled(s, c);
    case MethodTag::Variant: return step_variant(s, plan, c);
  }
  return s;
}

}  // namespace

TEST_CASE("method names") {
  for (MethodTag m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("newton"), std::invalid_argument);
}

TEST_CASE("initial states") {
  const Matrix a = Matrix::diagonal({0.25, 0.81});
  for (MethodTag m : kAllMethods) {
    const IterationState s = initial_state(a, 3, m);
    CHECK(s.k == 0);
    CHECK(s.x == Matrix::identity(2));
    switch (m) {
      case MethodTag::Plain: CHECK(s.aux == Matrix::zeros(2)); break;
      case MethodTag::Coupled: CHECK(s.aux == a); break;
      default: CHECK(max_abs_diff(s.aux, (1.0 / 3) * (a - Matrix::identity(2))) < 1e-16);
    }
  }
  CHECK_THROWS_AS(initial_state(a, 1, MethodTag::IN), std::invalid_argument);
  CHECK_THROWS_AS(initial_state(Matrix(2, 3), 2, MethodTag::IN), DimensionError);
}

TEST_CASE("scalar Newton steps") {
  OpCounter c;
  const Matrix a{{0.25}};
  const IterationState s1 = step_plain(a, initial_state(a, 2, MethodTag::Plain), c);
  CHECK(s1.x(0, 0) == doctest::Approx(0.625).epsilon(1e-15));

  const IterationState n1 = step_coupled(initial_state(a, 2, MethodTag::Coupled), c);
  CHECK(n1.x(0, 0) == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(n1.aux(0, 0) == doctest::Approx(0.64).epsilon(1e-14));

  // first IN and iter39 steps from x = 1, h = -0.375
  const IterationState i1 = step_in(initial_state(a, 2, MethodTag::IN), c);
  const IterationState j1 = step_iter39(initial_state(a, 2, MethodTag::Iter39), c);
  CHECK(i1.x(0, 0) == 0.625);
  CHECK(j1.x(0, 0) == 0.625);
  CHECK(i1.aux(0, 0) == doctest::Approx(j1.aux(0, 0)).epsilon(1e-14));
  // Newton: x2 = (0.625 + 0.25/0.625)/2 = 0.5125
  CHECK(i1.aux(0, 0) == doctest::Approx(0.5125 - 0.625).epsilon(1e-14));
}

TEST_CASE("plain Newton square roots of a diagonal") {
  OpCounter c;
  const Matrix a = Matrix::diagonal({0.09, 0.25});
  IterationState s = initial_state(a, 2, MethodTag::Plain);
  for (int k = 0; k < 30; ++k) s = step_plain(a, s, c);
  CHECK(max_abs_diff(s.x, Matrix::diagonal({0.3, 0.5})) < 1e-12);
}

TEST_CASE("identity is a fixed point of every method") {
  const Matrix a = Matrix::identity(3);
  for (int p : {2, 5, 7}) {
    const EvalPlan plan = build_plan(static_cast<std::uint64_t>(p - 2));
    for (MethodTag m : kAllMethods) {
      OpCounter c;
      IterationState s = initial_state(a, p, m);
      for (int k = 0; k < 3; ++k) s = step_any(a, s, plan, c);
      CHECK(s.x == Matrix::identity(3));
      if (m == MethodTag::Coupled) CHECK(s.aux == Matrix::identity(3));
      else CHECK(s.aux == Matrix::zeros(3));
    }
  }
}

TEST_CASE("zero increment stays zero") {
  OpCounter c;
  IterationState s;
  s.p = 5;
  s.x = Matrix::diagonal({0.7, 0.9});
  s.aux = Matrix::zeros(2);
  for (MethodTag m : {MethodTag::IN, MethodTag::Iter39, MethodTag::Variant}) {
    s.method = m;
    const IterationState t = step_any(Matrix(), s, build_plan(3), c);
    CHECK(t.x == s.x);
    CHECK(ref_norm(t.aux) == 0.0);
  }
  s.method = MethodTag::Coupled;
  s.aux = Matrix::identity(2);
  const IterationState t = step_coupled(s, c);
  CHECK(t.x == s.x);
  CHECK(t.aux == Matrix::identity(2));
}

TEST_CASE("IN follows plain Newton on diag(0.25, 0.81), p = 3") {
  OpCounter c;
  const Matrix a = Matrix::diagonal({0.25, 0.81});
  IterationState in = initial_state(a, 3, MethodTag::IN);
  Matrix x = Matrix::identity(2);
  for (int k = 0; k < 6; ++k) {
    in = step_in(in, c);
    x = ref_newton_step(a, x, 3);
    CHECK(max_abs_diff(in.x, x) < 1e-13);
  }
}

TEST_CASE("all five methods trace the Newton sequence") {
  for (int p : {5, 13, 59}) {
    const EvalPlan plan = build_plan(static_cast<std::uint64_t>(p - 2));
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const Matrix a = preconditioned_spd(6, 50.0, seed);
      Matrix ref = Matrix::identity(6);
      std::vector<IterationState> states;
      for (MethodTag m : kAllMethods) states.push_back(initial_state(a, p, m));
      for (int k = 0; k < 8; ++k) {
        ref = ref_newton_step(a, ref, p);
        for (auto& s : states) {
          OpCounter c;
          s = step_any(a, s, plan, c);
          CHECK_MESSAGE(rel_diff(ref, s.x) < 1e-9,
                        to_string(s.method) << " p=" << p << " k=" << k + 1);
        }
      }
    }
  }
}

TEST_CASE("iter39 matches IN on a 4x4 for ten steps") {
  const Matrix a = preconditioned_spd(4, 20.0, 99);
  OpCounter c;
  IterationState in = initial_state(a, 5, MethodTag::IN);
  IterationState it = initial_state(a, 5, MethodTag::Iter39);
  for (int k = 0; k < 10; ++k) {
    in = step_in(in, c);
    it = step_iter39(it, c);
    CHECK(rel_diff(in.x, it.x) < 1e-10);
  }
}

TEST_CASE("variant reproduces the IN increment from the same state") {
  // Early steps, while the increment is still large; see the acceptance
  // suite for the converged regime.
  for (int p : {5, 17, 59}) {
    const EvalPlan plan = build_plan(static_cast<std::uint64_t>(p - 2));
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const Matrix a = preconditioned_spd(5, 30.0, 10 + seed);
      IterationState s = initial_state(a, p, MethodTag::IN);
      for (int k = 0; k < 3; ++k) {
        OpCounter c;
        IterationState v = s;
        v.method = MethodTag::Variant;
        const IterationState hv = step_variant(v, plan, c);
        const IterationState hi = step_in(s, c);
        CHECK(hv.x == hi.x);
        CHECK_MESSAGE(rel_diff(hi.aux, hv.aux) < 1e-12, "p=" << p << " k=" << k);
        s = hi;
      }
    }
  }
}

TEST_CASE("variant rejects a plan of the wrong degree") {
  OpCounter c;
  const IterationState s = initial_state(Matrix::diagonal({0.5}), 7, MethodTag::Variant);
  CHECK_THROWS_AS(step_variant(s, build_plan(4), c), std::invalid_argument);
}

TEST_CASE("coupled iteration keeps N = X^{-p} A") {
  const Matrix a = preconditioned_spd(8, 100.0, 5);
  OpCounter c;
  IterationState s = initial_state(a, 7, MethodTag::Coupled);
  for (int k = 0; k < 12; ++k) {
    s = step_coupled(s, c);
    const Matrix expect = ref_mul(ref_inverse(ref_pow(s.x, 7)), a);
    CHECK(ref_norm(s.aux - expect) <= 1e-9 * ref_norm(a));
  }
}

TEST_CASE("per-step operation counts") {
  const Matrix a = preconditioned_spd(10, 10.0, 1);
  for (int p : {2, 3, 5, 17, 59, 100}) {
    const EvalPlan plan = build_plan(static_cast<std::uint64_t>(p - 2));
    auto delta = [&](MethodTag m) {
      OpCounter c;
      step_any(a, initial_state(a, p, m), plan, c);
      return c;
    };
    const auto up = static_cast<std::uint64_t>(p);
    OpCounter v = delta(MethodTag::Variant);
    CHECK(v.matmul_count() == plan.matmul_cost + 2);
    CHECK(v.lu_count() == 1);
    OpCounter in = delta(MethodTag::IN);
    CHECK(in.matmul_count() == up - 1);
    CHECK(in.lu_count() == 2);
    // (2p + 10/3) n^3 in thirds
    CHECK(in.flop_thirds() == (6 * up + 10) * 1000);
    OpCounter it = delta(MethodTag::Iter39);
    CHECK(it.matmul_count() == binary_power_cost(up - 1) + 2);
    CHECK(it.lu_count() == 1);
  }
  OpCounter c;
  const IterationState s = step_variant(initial_state(a, 59, MethodTag::Variant), build_plan(57), c);
  CHECK(c.matmul_count() == 11);
  CHECK(c.lu_count() == 1);
}

TEST_CASE("scalar convergence is quadratic") {
  // the error ratio e_{k+1}/e_k^2 settles near f''/(2f') = (p-1)/(2 r)
  const double a = 0.3;
  const int p = 5;
  const double root = std::pow(a, 1.0 / p);
  IterationState s = initial_state(Matrix{{a}}, p, MethodTag::Variant);
  const EvalPlan plan = build_plan(3);
  double prev = std::abs(s.x(0, 0) - root);
  int checked = 0;
  for (int k = 0; k < 12; ++k) {
    OpCounter c;
    s = step_variant(s, plan, c);
    const double e = std::abs(s.x(0, 0) - root);
    if (prev < 1e-2 && e > 1e-14) {
      CHECK(e / (prev * prev) < 2.0 * (p - 1) / (2 * root));
      ++checked;
    }
    prev = e;
  }
  CHECK(checked >= 1);
  CHECK(prev < 1e-15);
}

TEST_CASE("run on diag(0.0625), p = 4") {
  for (MethodTag m : {MethodTag::IN, MethodTag::Variant, MethodTag::Iter39, MethodTag::Coupled}) {
    OpCounter c;
    const RunResult r = run(Matrix::diagonal({0.0625}), 4, m, {}, c);
    CHECK(r.x(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.report.final_residual() < 1e-14);
    CHECK(r.report.iterations() <= 25);
  }
}

TEST_CASE("run on the identity stops at once") {
  for (MethodTag m : kAllMethods) {
    OpCounter c;
    const RunResult r = run(Matrix::identity(3), 6, m, {}, c);
    CHECK(r.report.iterations() == 0);
    CHECK(r.report.final_residual() == 0.0);
    CHECK(r.report.stop == StopReason::Residual);
    CHECK(c.matmul_count() == 0);
  }
}

TEST_CASE("run on a preconditioned 20x20, p = 59") {
  const Matrix a = preconditioned_spd(20, 380.0, 42);
  OpCounter c;
  const RunResult r = run(a, 59, MethodTag::Variant, {}, c, "spd20");
  CHECK(r.report.final_residual() <= 1e-12);
  CHECK(r.report.label == "spd20");
  CHECK(r.report.n == 20);
  for (std::size_t i = 1; i < r.report.rows.size(); ++i) {
    const auto& row = r.report.rows[i];
    CHECK(row.k == i);
    CHECK(row.cum_matmuls == 11 * i);
    CHECK(row.cum_lus == i);
    CHECK(row.increment_norm > 0.0);
  }
  CHECK(c.matmul_count() == 11 * r.report.iterations());
}

TEST_CASE("run failures keep the report") {
  const Matrix a = preconditioned_spd(6, 10.0, 2);
  OpCounter c;
  try {
    run(a, 13, MethodTag::IN, {1e-30, 0.0, 3}, c);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.report().stop == StopReason::MaxIter);
    CHECK(e.report().rows.size() == 4);
  }
  // a matrix with a zero eigenvalue: X_{k+1} eventually singular for plain Newton
  OpCounter c2;
  CHECK_THROWS_AS(run(Matrix::diagonal({1.0, 0.0}), 2, MethodTag::Plain, {0.0, 0.0, 200}, c2),
                  RunFailure);
}
