#include "prootkit/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace proot {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank_or_comment(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '%';
}

double parse_double(const std::string& tok, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE) {
    throw ParseError(line, "invalid number '" + tok + "'");
  }
  return v;
}

std::size_t parse_index(const std::string& tok, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE || v < 0) {
    throw ParseError(line, "invalid integer '" + tok + "'");
  }
  return static_cast<std::size_t>(v);
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream s(line);
  std::vector<std::string> out;
  for (std::string t; s >> t;) out.push_back(t);
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

Matrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError(1, "empty input, expected MatrixMarket banner");
  ++lineno;
  const auto banner = tokens(line);
  if (banner.size() != 5 || banner[0] != "%%MatrixMarket" || lower(banner[1]) != "matrix") {
    throw ParseError(lineno, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
  }
  const std::string format = lower(banner[2]);
  const std::string field = lower(banner[3]);
  const std::string symmetry = lower(banner[4]);
  if (format != "coordinate" && format != "array") {
    throw ParseError(lineno, "unknown format '" + banner[2] + "'");
  }
  if (field == "complex") throw ParseError(lineno, "complex matrices are not supported");
  if (field == "pattern") throw ParseError(lineno, "pattern matrices carry no values");
  if (field != "real" && field != "integer" && field != "double") {
    throw ParseError(lineno, "unknown field '" + banner[3] + "'");
  }
  if (symmetry == "hermitian") throw ParseError(lineno, "hermitian storage is not supported");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
    throw ParseError(lineno, "unknown symmetry '" + banner[4] + "'");
  }
  const bool sym = symmetry == "symmetric";
  const bool skew = symmetry == "skew-symmetric";

  auto next_data_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!blank_or_comment(line)) return true;
    }
    return false;
  };

  if (!next_data_line()) throw ParseError(lineno, "missing size line");
  const auto size = tokens(line);
  const std::size_t want = format == "coordinate" ? 3 : 2;
  if (size.size() != want) {
    throw ParseError(lineno, "size line needs " + std::to_string(want) + " integers");
  }
  const std::size_t rows = parse_index(size[0], lineno);
  const std::size_t cols = parse_index(size[1], lineno);
  if (rows == 0 || cols == 0) throw ParseError(lineno, "matrix dimensions must be positive");
  if ((sym || skew) && rows != cols) {
    throw ParseError(lineno, "symmetric storage requires a square matrix");
  }
  Matrix m(rows, cols);

  if (format == "coordinate") {
    const std::size_t nnz = parse_index(size[2], lineno);
    for (std::size_t e = 0; e < nnz; ++e) {
      if (!next_data_line()) {
        throw ParseError(lineno, "expected " + std::to_string(nnz) + " entries, found " +
                                     std::to_string(e));
      }
      const auto t = tokens(line);
      if (t.size() != 3) throw ParseError(lineno, "coordinate entry needs 'row col value'");
      const std::size_t i = parse_index(t[0], lineno);
      const std::size_t j = parse_index(t[1], lineno);
      if (i < 1 || i > rows || j < 1 || j > cols) {
        throw ParseError(lineno, "entry (" + t[0] + "," + t[1] + ") outside " +
                                     std::to_string(rows) + "x" + std::to_string(cols));
      }
      if ((sym || skew) && j > i) {
        throw ParseError(lineno, "symmetric storage must list the lower triangle only");
      }
      const double v = parse_double(t[2], lineno);
      m(i - 1, j - 1) += v;
      if (i != j) {
        if (sym) m(j - 1, i - 1) += v;
        if (skew) m(j - 1, i - 1) -= v;
      }
    }
  } else {
    // column-major; symmetric variants store the lower triangle
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t start = sym ? j : (skew ? j + 1 : 0);
      for (std::size_t i = start; i < rows; ++i) {
        if (!next_data_line()) throw ParseError(lineno, "too few array entries");
        const auto t = tokens(line);
        if (t.size() != 1) throw ParseError(lineno, "array entry needs a single value");
        const double v = parse_double(t[0], lineno);
        m(i, j) = v;
        if (i != j) {
          if (sym) m(j, i) = v;
          if (skew) m(j, i) = -v;
        }
      }
    }
  }
  if (next_data_line()) throw ParseError(lineno, "unexpected data after the last entry");
  return m;
}

Matrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix& m, MmLayout layout) {
  char buf[64];
  if (layout == MmLayout::Array) {
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t j = 0; j < m.cols(); ++j)
      for (std::size_t i = 0; i < m.rows(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
        out << buf << '\n';
      }
  } else {
    std::size_t nnz = 0;
    for (double v : m.data()) nnz += v != 0.0;
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
    for (std::size_t j = 0; j < m.cols(); ++j)
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (m(i, j) == 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
        out << i + 1 << ' ' << j + 1 << ' ' << buf << '\n';
      }
  }
  if (!out) throw IoError("write_matrix_market: stream error");
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& m, MmLayout layout) {
  auto out = open_out(path);
  write_matrix_market(out, m, layout);
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError(1, "missing CSV column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

void write_csv_row(std::ostream& out, const CsvRow& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    const std::string& f = row[i];
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
      out << f;
    } else {
      out << '"';
      for (char c : f) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    }
  }
  out << '\n';
}

CsvTable read_csv(std::istream& in) {
  std::vector<CsvRow> all;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      all.push_back(std::move(row));
      row.clear();
      ++line;
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw ParseError(line, "unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    all.push_back(std::move(row));
  }
  if (all.empty()) throw ParseError(1, "empty CSV");
  CsvTable t;
  t.header = std::move(all.front());
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].size() != t.header.size()) {
      throw ParseError(i + 1, "row has " + std::to_string(all[i].size()) + " fields, header has " +
                                  std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(all[i]));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_csv(in);
}

std::string format_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

namespace {

const CsvRow kReportHeader = {"method",  "p",        "n",         "label",
                              "stop",    "k",        "residual",  "increment_norm",
                              "wall_ms", "cum_matmuls", "cum_lus", "cum_flop_estimate"};

StopReason parse_stop(const std::string& s, std::size_t line) {
  for (StopReason r : {StopReason::Residual, StopReason::Increment, StopReason::MaxIter,
                       StopReason::Breakdown})
    if (to_string(r) == s) return r;
  throw ParseError(line, "unknown stop reason '" + s + "'");
}

}  // namespace

void write_report_csv(std::ostream& out, const ConvergenceReport& report) {
  write_csv_row(out, kReportHeader);
  char flops[64];
  for (const ReportRow& r : report.rows) {
    std::snprintf(flops, sizeof flops, "%.17g", r.cum_flop_estimate);
    write_csv_row(out, {std::string(to_string(report.method)), std::to_string(report.p),
                        std::to_string(report.n), report.label,
                        std::string(to_string(report.stop)), std::to_string(r.k),
                        format_sci(r.residual), format_sci(r.increment_norm),
                        format_fixed(r.wall_ms, 6), std::to_string(r.cum_matmuls),
                        std::to_string(r.cum_lus), flops});
  }
  if (!out) throw IoError("write_report_csv: stream error");
}

void write_report_csv(const std::filesystem::path& path, const ConvergenceReport& report) {
  auto out = open_out(path);
  write_report_csv(out, report);
}

ConvergenceReport read_report_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  for (const auto& name : kReportHeader) (void)t.column(name);
  ConvergenceReport report;
  std::uint64_t prev_k = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const CsvRow& row = t.rows[i];
    const std::size_t line = i + 2;
    auto get = [&](const char* name) -> const std::string& { return row[t.column(name)]; };
    try {
      if (i == 0) {
        report.method = parse_method(get("method"));
        report.p = static_cast<int>(parse_index(get("p"), line));
        report.n = parse_index(get("n"), line);
        report.label = get("label");
        report.stop = parse_stop(get("stop"), line);
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
    ReportRow r;
    r.k = parse_index(get("k"), line);
    if (i > 0 && r.k <= prev_k) throw ParseError(line, "rows not strictly ordered by k");
    prev_k = r.k;
    r.residual = parse_double(get("residual"), line);
    r.increment_norm = parse_double(get("increment_norm"), line);
    r.wall_ms = parse_double(get("wall_ms"), line);
    r.cum_matmuls = parse_index(get("cum_matmuls"), line);
    r.cum_lus = parse_index(get("cum_lus"), line);
    r.cum_flop_estimate = parse_double(get("cum_flop_estimate"), line);
    report.rows.push_back(r);
  }
  return report;
}

ConvergenceReport read_report_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_report_csv(in);
}

}  // namespace proot
