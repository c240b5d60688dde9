#include "prootkit/polyplan.hpp"

#include <algorithm>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "prootkit/linalg.hpp"

namespace proot {

namespace {

class PlanBuilder {
 public:
  explicit PlanBuilder(std::uint64_t degree) { plan_.degree = degree; }

  EvalPlan finish(Slot result) {
    plan_.result_slot = result;
    plan_.matmul_cost = static_cast<std::uint64_t>(std::count_if(
        plan_.steps.begin(), plan_.steps.end(),
        [](const Step& s) { return s.is_multiplication(); }));
    return std::move(plan_);
  }

  // X^(2^level), squaring on demand
  Slot power(std::size_t level) {
    while (chain_.size() <= level) chain_.push_back(emit(SquareStep{chain_.back()}));
    return chain_[level];
  }

  // Slot holding P_d(Y) with Y = X^(2^level).
  Slot geometric(std::uint64_t d, std::size_t level) {
    if (d == 0) return emit(AffineStep{{}, 1.0});
    if (d == 1) return emit(AffineStep{{{1.0, power(level)}}, 1.0});
    if (d == 2) return emit(AffineStep{{{1.0, power(level + 1)}, {1.0, power(level)}}, 1.0});
    if (d % 2 == 1) {
      const Slot inner = geometric((d - 1) / 2, level + 1);
      const Slot factor = emit(AffineStep{{{1.0, power(level)}}, 1.0});
      return emit(ProductStep{inner, factor});
    }
    const Slot inner = geometric((d - 2) / 2, level + 1);
    const Slot factor = emit(AffineStep{{{1.0, power(level + 1)}, {1.0, power(level)}}, 0.0});
    const Slot prod = emit(ProductStep{inner, factor});
    return emit(AffineStep{{{1.0, prod}}, 1.0});
  }

 private:
  template <class Kind>
  Slot emit(Kind kind) {
    const Slot dst = plan_.steps.size() + 1;
    plan_.steps.push_back(Step{std::move(kind), dst});
    return dst;
  }

  EvalPlan plan_;
  std::vector<Slot> chain_{0};
};

// Symbolic value of a slot, used only for rendering.
struct Expr {
  enum class Kind { Power, Sum, Product } kind;
  std::uint64_t power = 0;
  std::vector<std::pair<double, std::shared_ptr<const Expr>>> terms;
  double identity_coef = 0.0;
  std::vector<std::shared_ptr<const Expr>> factors;
};

using ExprPtr = std::shared_ptr<const Expr>;

int product_height(const Expr& e) {
  int h = 0;
  for (const auto& [c, t] : e.terms) h = std::max(h, product_height(*t));
  for (const auto& f : e.factors) h = std::max(h, product_height(*f));
  return e.kind == Expr::Kind::Product ? h + 1 : h;
}

std::string coef_prefix(double c) {
  if (c == 1.0) return "";
  std::ostringstream s;
  s << c << '*';
  return s.str();
}

std::string render(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Power:
      return e.power == 1 ? "X" : "X^" + std::to_string(e.power);
    case Expr::Kind::Sum: {
      std::string out;
      for (const auto& [c, t] : e.terms) {
        if (!out.empty()) out += '+';
        out += coef_prefix(c) + render(*t);
      }
      if (e.identity_coef != 0.0) {
        if (!out.empty()) out += '+';
        out += coef_prefix(e.identity_coef) + "I";
      }
      return out.empty() ? "0" : out;
    }
    case Expr::Kind::Product: {
      static constexpr const char* kOpen[] = {"(", "[", "{"};
      static constexpr const char* kClose[] = {")", "]", "}"};
      const int style = (product_height(e) - 1) % 3;
      std::string out;
      for (const auto& f : e.factors) out += kOpen[style] + render(*f) + kClose[style];
      return out;
    }
  }
  return {};
}

}  // namespace

std::size_t EvalPlan::square_count() const {
  return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const Step& s) {
    return std::holds_alternative<SquareStep>(s.kind);
  }));
}

EvalPlan build_plan(std::uint64_t d) {
  PlanBuilder b(d);
  const Slot result = b.geometric(d, 0);
  return b.finish(result);
}

Matrix eval_plan(const EvalPlan& plan, const Matrix& x, OpCounter& counter) {
  if (!x.square()) throw DimensionError("eval_plan: argument is not square");
  const std::size_t n = x.rows();

  // release intermediates after their last reader
  std::vector<std::size_t> last_use(plan.slot_count(), 0);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SquareStep>) {
            last_use[k.src] = i;
          } else if constexpr (std::is_same_v<K, ProductStep>) {
            last_use[k.lhs] = i;
            last_use[k.rhs] = i;
          } else {
            for (const auto& t : k.terms) last_use[t.second] = i;
          }
        },
        plan.steps[i].kind);
  }

  std::vector<Matrix> slots(plan.slot_count());
  slots[0] = x;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const Step& step = plan.steps[i];
    Matrix value = std::visit(
        [&](const auto& k) -> Matrix {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SquareStep>) {
            return matmul(slots[k.src], slots[k.src], counter);
          } else if constexpr (std::is_same_v<K, ProductStep>) {
            return matmul(slots[k.lhs], slots[k.rhs], counter);
          } else {
            Matrix acc(n, n);
            for (const auto& [c, src] : k.terms) acc = axpy_affine(1.0, acc, c, slots[src], 0.0);
            if (k.identity_coef != 0.0)
              for (std::size_t r = 0; r < n; ++r) acc(r, r) += k.identity_coef;
            return acc;
          }
        },
        step.kind);
    slots[step.dst] = std::move(value);
    for (Slot s = 0; s < slots.size(); ++s)
      if (s != plan.result_slot && last_use[s] == i && s < step.dst) slots[s] = Matrix();
  }
  return std::move(slots[plan.result_slot]);
}

std::vector<std::pair<int, std::uint64_t>> plan_cost_table(int p_min, int p_max) {
  if (p_min < 5 || p_max < p_min) {
    throw std::invalid_argument("plan_cost_table: need 5 <= p_min <= p_max");
  }
  std::vector<std::pair<int, std::uint64_t>> rows;
  rows.reserve(static_cast<std::size_t>(p_max - p_min + 1));
  for (int p = p_min; p <= p_max; ++p) {
    rows.emplace_back(p, build_plan(static_cast<std::uint64_t>(p - 2)).matmul_cost + 2);
  }
  return rows;
}

std::string render_factored(const EvalPlan& plan) {
  std::vector<ExprPtr> slots(plan.slot_count());
  slots[0] = std::make_shared<const Expr>(Expr{Expr::Kind::Power, 1, {}, 0.0, {}});
  for (const Step& step : plan.steps) {
    slots[step.dst] = std::visit(
        [&](const auto& k) -> ExprPtr {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SquareStep>) {
            const Expr& src = *slots[k.src];
            if (src.kind != Expr::Kind::Power) {
              throw std::logic_error("render_factored: squaring of a non-power slot");
            }
            return std::make_shared<const Expr>(
                Expr{Expr::Kind::Power, src.power * 2, {}, 0.0, {}});
          } else if constexpr (std::is_same_v<K, ProductStep>) {
            Expr e{Expr::Kind::Product, 0, {}, 0.0, {}};
            for (Slot s : {k.lhs, k.rhs}) {
              const ExprPtr& f = slots[s];
              if (f->kind == Expr::Kind::Product) {
                e.factors.insert(e.factors.end(), f->factors.begin(), f->factors.end());
              } else {
                e.factors.push_back(f);
              }
            }
            return std::make_shared<const Expr>(std::move(e));
          } else {
            Expr e{Expr::Kind::Sum, 0, {}, k.identity_coef, {}};
            for (const auto& [c, s] : k.terms) e.terms.emplace_back(c, slots[s]);
            return std::make_shared<const Expr>(std::move(e));
          }
        },
        step.kind);
  }
  return render(*slots[plan.result_slot]);
}

}  // namespace proot
