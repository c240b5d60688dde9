#include "prootkit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "prootkit/io.hpp"
#include "prootkit/linalg.hpp"
#include "prootkit/precondition.hpp"

namespace proot {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw std::invalid_argument(std::string(what) + ": not a number '" + s + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s.front() == '-') {
    throw std::invalid_argument(std::string(what) + ": not a nonnegative integer '" + s + "'");
  }
  return v;
}

// Orthogonal factor of a Householder QR of g (n x n), accumulated explicitly.
Matrix householder_q(Matrix g) {
  const std::size_t n = g.rows();
  std::vector<std::vector<double>> reflectors;
  std::vector<double> betas;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::vector<double> v(n - k);
    double norm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      v[i - k] = g(i, k);
      norm2 += v[i - k] * v[i - k];
    }
    const double alpha = (v[0] >= 0 ? -1.0 : 1.0) * std::sqrt(norm2);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    const double beta = vnorm2 > 0.0 ? 2.0 / vnorm2 : 0.0;
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i - k] * g(i, j);
      dot *= beta;
      for (std::size_t i = k; i < n; ++i) g(i, j) -= dot * v[i - k];
    }
    reflectors.push_back(std::move(v));
    betas.push_back(beta);
  }
  Matrix q = Matrix::identity(n);
  for (std::size_t r = reflectors.size(); r-- > 0;) {
    const auto& v = reflectors[r];
    const std::size_t k = r;
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i - k] * q(i, j);
      dot *= betas[r];
      for (std::size_t i = k; i < n; ++i) q(i, j) -= dot * v[i - k];
    }
  }
  return q;
}

std::string optional_sci(const std::optional<double>& v) {
  return v ? format_sci(*v) : std::string();
}

}  // namespace

MatrixSource parse_source(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view kind = colon == std::string_view::npos ? "" : spec.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? spec : spec.substr(colon + 1);
  if (kind == "identity") {
    const auto n = to_uint(std::string(rest), "identity");
    if (n == 0) throw std::invalid_argument("identity: size must be positive");
    return IdentitySource{n};
  }
  if (kind == "diag") {
    DiagSource d;
    for (const auto& tok : split(rest, ',')) d.entries.push_back(to_double(tok, "diag"));
    return d;
  }
  if (kind == "random-spd") {
    const auto parts = split(rest, ',');
    if (parts.size() != 3) throw std::invalid_argument("random-spd: expected N,COND,SEED");
    RandomSpdSource r{to_uint(parts[0], "random-spd size"), to_double(parts[1], "random-spd cond"),
                      to_uint(parts[2], "random-spd seed")};
    if (r.n == 0) throw std::invalid_argument("random-spd: size must be positive");
    if (!(r.cond_target >= 1.0)) throw std::invalid_argument("random-spd: cond must be >= 1");
    return r;
  }
  if (kind == "mm") return MmFileSource{std::string(rest)};
  if (spec.empty()) throw std::invalid_argument("empty matrix source");
  return MmFileSource{std::string(spec)};
}

std::string describe(const MatrixSource& source) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        std::ostringstream o;
        if constexpr (std::is_same_v<S, MmFileSource>) {
          o << s.path.filename().string();
        } else if constexpr (std::is_same_v<S, RandomSpdSource>) {
          o << "random-spd:" << s.n << ',' << s.cond_target << ',' << s.seed;
        } else if constexpr (std::is_same_v<S, DiagSource>) {
          o << "diag:";
          for (std::size_t i = 0; i < s.entries.size(); ++i) o << (i ? "," : "") << s.entries[i];
        } else {
          o << "identity:" << s.n;
        }
        return o.str();
      },
      source);
}

Matrix load_matrix(const MatrixSource& source) {
  return std::visit(
      [](const auto& s) -> Matrix {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, MmFileSource>) {
          Matrix m = read_matrix_market(s.path);
          if (!m.square()) throw DimensionError("matrix in '" + s.path.string() + "' is not square");
          return m;
        } else if constexpr (std::is_same_v<S, RandomSpdSource>) {
          return gen_random_spd(s.n, s.cond_target, s.seed);
        } else if constexpr (std::is_same_v<S, DiagSource>) {
          return Matrix::diagonal(s.entries);
        } else {
          return Matrix::identity(s.n);
        }
      },
      source);
}

Matrix gen_random_spd(std::size_t n, double cond_target, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("gen_random_spd: n must be positive");
  if (!(cond_target >= 1.0)) throw std::invalid_argument("gen_random_spd: cond_target < 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;

  Matrix g(n, n);
  for (double& v : g.data()) v = gauss(rng);
  const Matrix q = householder_q(std::move(g));

  const double log_lo = -std::log(cond_target);
  std::vector<double> d(n);
  for (double& v : d) v = std::exp(log_lo * unit(rng));
  if (n >= 2) {
    d.front() = 1.0 / cond_target;
    d.back() = 1.0;
  }

  Matrix qd = q;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) qd(i, j) *= d[j];
  OpCounter scratch;
  Matrix a = matmul(qd, q.transpose(), scratch);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = s;
      a(j, i) = s;
    }
  return a;
}

const BenchMethodResult* BenchSummary::find(MethodTag m) const {
  for (const auto& r : methods)
    if (r.method == m) return &r;
  return nullptr;
}

BenchSummary run_bench(const Matrix& a, const BenchOptions& options) {
  if (options.repeats < 1) throw std::invalid_argument("run_bench: repeats must be >= 1");
  BenchSummary summary;
  summary.p = options.p;
  summary.n = a.rows();
  summary.label = options.label;

  std::optional<PreconditionedProblem> problem;
  if (options.precondition) {
    OpCounter scratch;
    problem = precondition(a, options.p, scratch);
  }
  const Matrix& target = problem ? problem->a_tilde : a;

  for (MethodTag method : options.methods) {
    BenchMethodResult best;
    best.method = method;
    best.total_wall_ms = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < options.repeats; ++rep) {
      OpCounter counter;
      try {
        RunResult r = run(target, options.p, method, options.stop, counter, options.label);
        const double ms = r.report.total_wall_ms();
        if (ms < best.total_wall_ms) {
          best.total_wall_ms = ms;
          best.report = std::move(r.report);
          best.matmuls = counter.matmul_count();
          best.lus = counter.lu_count();
          best.flop_estimate = counter.flop_estimate();
          if (problem) {
            best.recovered_residual =
                relative_residual(recover_root(*problem, r.x), a, options.p);
          }
        }
      } catch (const RunFailure& e) {
        best.failure = e.what();
        best.report = e.report();
        best.total_wall_ms = e.report().total_wall_ms();
        best.matmuls = counter.matmul_count();
        best.lus = counter.lu_count();
        best.flop_estimate = counter.flop_estimate();
        break;
      }
    }
    const std::uint64_t iters = best.report.iterations();
    if (iters > 0) {
      best.per_iter_coeff =
          Rational(static_cast<std::int64_t>(6 * best.matmuls + 8 * best.lus),
                   static_cast<std::int64_t>(3 * iters));
    }
    summary.methods.push_back(std::move(best));
  }
  return summary;
}

void write_summary_csv(std::ostream& out, const BenchSummary& summary) {
  write_csv_row(out, {"method", "p", "n", "label", "iterations", "stop", "total_wall_ms",
                      "time_ratio_vs_in", "final_residual", "recovered_residual", "matmuls",
                      "lus", "flop_estimate", "per_iter_coeff", "per_iter_coeff_value",
                      "flop_ratio_vs_in", "flop_ratio_vs_in_value", "failure"});
  const BenchMethodResult* in = summary.find(MethodTag::IN);
  char buf[64];
  for (const auto& r : summary.methods) {
    std::string time_ratio, flop_ratio, flop_ratio_value;
    if (in && !in->failure && !r.failure && in->total_wall_ms > 0.0) {
      time_ratio = format_fixed(r.total_wall_ms / in->total_wall_ms, 6);
    }
    if (in && in->per_iter_coeff.numerator() != 0 && r.per_iter_coeff.numerator() != 0) {
      const Rational ratio = r.per_iter_coeff / in->per_iter_coeff;
      flop_ratio = to_string(ratio);
      flop_ratio_value = format_fixed(boost::rational_cast<double>(ratio), 6);
    }
    std::snprintf(buf, sizeof buf, "%.17g", r.flop_estimate);
    write_csv_row(out, {std::string(to_string(r.method)), std::to_string(summary.p),
                        std::to_string(summary.n), summary.label,
                        std::to_string(r.report.iterations()),
                        std::string(to_string(r.report.stop)), format_fixed(r.total_wall_ms, 6),
                        time_ratio, format_sci(r.report.final_residual()),
                        optional_sci(r.recovered_residual), std::to_string(r.matmuls),
                        std::to_string(r.lus), buf, to_string(r.per_iter_coeff),
                        format_fixed(boost::rational_cast<double>(r.per_iter_coeff), 6),
                        flop_ratio, flop_ratio_value, r.failure.value_or("")});
  }
}

void write_cost_csv(std::ostream& out, const std::vector<CostRow>& rows) {
  write_csv_row(out, {"p", "in", "variant", "iter39", "variant_law", "law_agrees",
                      "variant_over_in", "in_value", "variant_value", "iter39_value"});
  for (const auto& r : rows) {
    auto val = [](const Rational& q) { return format_fixed(boost::rational_cast<double>(q), 6); };
    write_csv_row(out, {std::to_string(r.p), to_string(r.in), to_string(r.variant),
                        to_string(r.iter39), to_string(r.law), r.law_agrees ? "1" : "0",
                        val(r.variant / r.in), val(r.in), val(r.variant), val(r.iter39)});
  }
}

}  // namespace proot
