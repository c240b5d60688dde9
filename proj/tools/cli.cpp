#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prootkit/costmodel.hpp"
#include "prootkit/harness.hpp"
#include "prootkit/io.hpp"
#include "prootkit/iterations.hpp"
#include "prootkit/linalg.hpp"
#include "prootkit/polyplan.hpp"
#include "prootkit/precondition.hpp"

namespace proot::cli {

namespace {

namespace fs = std::filesystem;

std::string env_name(const std::string& flag) {
  std::string name = "PROOTKIT_";
  for (char c : flag) {
    if (c == '-') {
      if (name.back() != '_') name += '_';
    } else {
      name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
  }
  // "--p" and friends: drop the leading dashes that became underscores
  name.erase(9, name.find_first_not_of('_', 9) - 9);
  return name;
}

template <class T>
CLI::Option* opt(CLI::App* app, const std::string& flag, T& value, const std::string& help) {
  return app->add_option(flag, value, help)->envname(env_name(flag));
}

struct StopFlags {
  double tol = StoppingRule{}.tol;
  double h_tol = StoppingRule{}.h_tol;
  std::uint64_t max_iter = StoppingRule{}.max_iter;

  void attach(CLI::App* app) {
    opt(app, "--tol", tol, "relative residual threshold")->capture_default_str();
    opt(app, "--h-tol", h_tol, "relative increment threshold")->capture_default_str();
    opt(app, "--max-iter", max_iter, "iteration limit")->capture_default_str();
  }
  StoppingRule rule() const { return {tol, h_tol, max_iter}; }
};

struct RootFlags {
  std::string input;
  int p = 2;
  std::string method = "variant";
  StopFlags stop;
  bool precondition = true;
  bool recover = false;
  std::string out_path;
  std::string report_path;
};

struct BenchFlags {
  std::string input;
  int p = 59;
  std::string methods = "in,variant,iter39";
  int repeats = 1;
  std::string report_dir = ".";
  StopFlags stop;
  bool precondition = true;
};

struct DecomposeFlags {
  std::optional<std::uint64_t> d;
  std::optional<int> p;
};

struct CostFlags {
  int p_min = 5;
  int p_max = 100;
  std::string out_path;
};

// Raised for problems that belong to the "bad flags" exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path recovered_path(const fs::path& out) {
  fs::path p = out;
  const std::string ext = out.extension().string();
  p.replace_filename(out.stem().string() + ".recovered" + (ext.empty() ? ".mtx" : ext));
  return p;
}

std::vector<MethodTag> parse_method_list(const std::string& list) {
  std::vector<MethodTag> methods;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const std::string tok = list.substr(start, comma - start);
    if (!tok.empty()) methods.push_back(parse_method(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (methods.empty()) throw std::invalid_argument("--methods: empty method list");
  return methods;
}

Matrix load_input(const std::string& spec) {
  MatrixSource source;
  try {
    source = parse_source(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--input: ") + e.what());
  }
  return load_matrix(source);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int do_root(const RootFlags& f, std::ostream& out, std::ostream& err) {
  if (f.p < 2) throw UsageError("--p must be at least 2");
  const MethodTag method = parse_method(f.method);
  const Matrix a = load_input(f.input);
  const std::string label = describe(parse_source(f.input));

  OpCounter pre_counter;
  std::optional<PreconditionedProblem> problem;
  if (f.precondition) problem = precondition(a, f.p, pre_counter);
  const Matrix& target = problem ? problem->a_tilde : a;

  OpCounter counter;
  std::optional<RunResult> result;
  std::string failure;
  ConvergenceReport report;
  try {
    result = run(target, f.p, method, f.stop.rule(), counter, label);
    report = result->report;
  } catch (const RunFailure& e) {
    failure = e.what();
    report = e.report();
  }

  if (!f.report_path.empty()) write_report_csv(fs::path(f.report_path), report);

  if (!result) {
    err << "prootkit: " << failure << '\n';
    return kNoConvergence;
  }

  out << "method " << to_string(method) << ", p = " << f.p << ", n = " << a.rows() << '\n';
  out << "iterations " << report.iterations() << " (stop: " << to_string(report.stop) << ")\n";
  out << "residual " << sci(report.final_residual())
      << (problem ? " (against the preconditioned matrix)" : "") << '\n';
  out << "counted " << counter.matmul_count() << " products, " << counter.lu_count()
      << " LU divisions, " << sci(counter.flop_estimate()) << " flops\n";

  std::optional<Matrix> recovered;
  if (f.recover) {
    recovered = problem ? recover_root(*problem, result->x) : result->x;
    out << "recovered residual " << sci(relative_residual(*recovered, a, f.p)) << '\n';
  }
  if (!f.out_path.empty()) {
    write_matrix_market(fs::path(f.out_path), result->x);
    if (recovered) write_matrix_market(recovered_path(f.out_path), *recovered);
  }

  if (report.final_residual() > f.stop.tol) {
    err << "prootkit: iteration stagnated at residual " << sci(report.final_residual())
        << " above --tol " << sci(f.stop.tol) << '\n';
    return kNoConvergence;
  }
  return kOk;
}

int do_bench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
  if (f.p < 2) throw UsageError("--p must be at least 2");
  if (f.repeats < 1) throw UsageError("--repeats must be at least 1");
  BenchOptions opts;
  opts.p = f.p;
  opts.methods = parse_method_list(f.methods);
  opts.repeats = f.repeats;
  opts.stop = f.stop.rule();
  opts.precondition = f.precondition;
  opts.label = describe(parse_source(f.input));
  const Matrix a = load_input(f.input);

  const BenchSummary summary = run_bench(a, opts);

  const fs::path dir(f.report_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory '" + dir.string() + "'");
  for (const auto& m : summary.methods) {
    write_report_csv(dir / (std::string(to_string(m.method)) + ".csv"), m.report);
  }
  {
    std::ofstream s(dir / "summary.csv");
    if (!s) throw IoError("cannot write '" + (dir / "summary.csv").string() + "'");
    write_summary_csv(s, summary);
  }

  const BenchMethodResult* in = summary.find(MethodTag::IN);
  bool failed = false;
  out << "p = " << summary.p << ", n = " << summary.n << ", input " << summary.label << '\n';
  for (const auto& m : summary.methods) {
    char line[256];
    std::snprintf(line, sizeof line, "%-8s iters %3llu  time %10.3f ms  residual %s  coeff %s",
                  std::string(to_string(m.method)).c_str(),
                  static_cast<unsigned long long>(m.report.iterations()), m.total_wall_ms,
                  sci(m.report.final_residual()).c_str(), to_string(m.per_iter_coeff).c_str());
    out << line;
    if (in && !in->failure && !m.failure && in->total_wall_ms > 0.0) {
      std::snprintf(line, sizeof line, "  time/in %.3f", m.total_wall_ms / in->total_wall_ms);
      out << line;
    }
    out << '\n';
    if (m.failure) {
      err << "prootkit: " << *m.failure << '\n';
      failed = true;
    }
  }
  out << "reports written to " << dir.string() << '\n';
  return failed ? kNoConvergence : kOk;
}

int do_decompose(const DecomposeFlags& f, std::ostream& out) {
  if (f.d.has_value() == f.p.has_value()) throw UsageError("give exactly one of --d or --p");
  if (f.p && *f.p < 2) throw UsageError("--p must be at least 2");
  const std::uint64_t d = f.d ? *f.d : static_cast<std::uint64_t>(*f.p - 2);
  const EvalPlan plan = build_plan(d);
  const std::size_t squares = plan.square_count();
  out << "P_" << d << "(X) = " << render_factored(plan) << '\n';
  out << plan.matmul_cost << " multiplications (" << squares << " squarings, "
      << plan.matmul_cost - squares << " products)\n";
  if (f.p) {
    out << "per variant iteration for p = " << *f.p << ": " << plan.matmul_cost + 2
        << " multiplications\n";
  }
  return kOk;
}

int do_cost(const CostFlags& f, std::ostream& out, std::ostream& err) {
  if (f.p_min < 5 || f.p_max < f.p_min) throw UsageError("need 5 <= --p-min <= --p-max");
  const auto rows = cost_curve(f.p_min, f.p_max);
  if (f.out_path.empty()) {
    write_cost_csv(out, rows);
  } else {
    std::ofstream file(f.out_path);
    if (!file) throw IoError("cannot write '" + f.out_path + "'");
    write_cost_csv(file, rows);
  }
  std::vector<int> off;
  for (const auto& r : rows)
    if (!r.law_agrees) off.push_back(r.p);
  if (!off.empty()) {
    err << "variant cost differs from 2*floor(2 log2(p-1)) + 8/3 at p =";
    for (int p : off) err << ' ' << p;
    err << '\n';
  }
  return kOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Principal matrix p-th roots by Newton-type iterations"};
  app.name("prootkit");
  app.require_subcommand(1);

  RootFlags root;
  auto* root_cmd = app.add_subcommand("root", "compute the principal p-th root of one matrix");
  opt(root_cmd, "--input", root.input, "identity:N | diag:V,... | random-spd:N,COND,SEED | PATH")
      ->required();
  opt(root_cmd, "--p", root.p, "root order")->required();
  opt(root_cmd, "--method", root.method, "plain|in|iter39|coupled|variant")->capture_default_str();
  root.stop.attach(root_cmd);
  root_cmd->add_flag("--precondition,!--no-precondition", root.precondition,
                     "work on A^{1/2}/||A^{1/2}||_F (default on)")
      ->envname("PROOTKIT_PRECONDITION");
  root_cmd->add_flag("--recover", root.recover, "also report and write the root of A itself")
      ->envname("PROOTKIT_RECOVER");
  opt(root_cmd, "--out", root.out_path, "MatrixMarket output for X");
  opt(root_cmd, "--report", root.report_path, "convergence report CSV");

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "compare methods on one preconditioned matrix");
  opt(bench_cmd, "--input", bench.input, "matrix source, as for root")->required();
  opt(bench_cmd, "--p", bench.p, "root order")->capture_default_str();
  opt(bench_cmd, "--methods", bench.methods, "comma-separated methods")->capture_default_str();
  opt(bench_cmd, "--repeats", bench.repeats, "timed repeats per method (fastest kept)")
      ->capture_default_str();
  opt(bench_cmd, "--report-dir", bench.report_dir, "directory for CSV reports")
      ->capture_default_str();
  bench.stop.attach(bench_cmd);
  bench_cmd->add_flag("--precondition,!--no-precondition", bench.precondition,
                      "work on A^{1/2}/||A^{1/2}||_F (default on)")
      ->envname("PROOTKIT_PRECONDITION");

  DecomposeFlags decompose;
  auto* decompose_cmd =
      app.add_subcommand("decompose", "print the factored form of P_d and its cost");
  opt(decompose_cmd, "--d", decompose.d, "polynomial degree");
  opt(decompose_cmd, "--p", decompose.p, "root order (uses d = p - 2)");

  CostFlags cost;
  auto* cost_cmd = app.add_subcommand("cost", "per-iteration cost table as CSV");
  opt(cost_cmd, "--p-min", cost.p_min, "first p")->capture_default_str();
  opt(cost_cmd, "--p-max", cost.p_max, "last p")->capture_default_str();
  opt(cost_cmd, "--out", cost.out_path, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadFlags;
  }

  try {
    if (*root_cmd) return do_root(root, out, err);
    if (*bench_cmd) return do_bench(bench, out, err);
    if (*decompose_cmd) return do_decompose(decompose, out);
    if (*cost_cmd) return do_cost(cost, out, err);
  } catch (const UsageError& e) {
    err << "prootkit: " << e.what() << "\n" << app.help();
    return kBadFlags;
  } catch (const std::invalid_argument& e) {
    err << "prootkit: " << e.what() << '\n';
    return kBadFlags;
  } catch (const IoError& e) {
    err << "prootkit: " << e.what() << '\n';
    return kIoError;
  } catch (const ParseError& e) {
    err << "prootkit: " << e.what() << '\n';
    return kIoError;
  } catch (const RunFailure& e) {
    err << "prootkit: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const SingularMatrixError& e) {
    err << "prootkit: " << e.what() << '\n';
    return kNoConvergence;
  }
  return kBadFlags;
}

}  // namespace proot::cli
