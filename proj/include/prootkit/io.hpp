#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "prootkit/iterations.hpp"
#include "prootkit/matrix.hpp"

namespace proot {

/// Malformed input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// MatrixMarket: coordinate and array layouts; real or integer fields;
// general, symmetric and skew-symmetric storage. Complex, hermitian and
// pattern files are rejected.
Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market(const std::filesystem::path& path);

enum class MmLayout { Array, Coordinate };

void write_matrix_market(std::ostream& out, const Matrix& m, MmLayout layout = MmLayout::Array);
void write_matrix_market(const std::filesystem::path& path, const Matrix& m,
                         MmLayout layout = MmLayout::Array);

// CSV: RFC 4180 quoting, '.' decimal separator, first row is the header.
using CsvRow = std::vector<std::string>;

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;

  /// Column index by header name; throws ParseError when absent.
  std::size_t column(const std::string& name) const;
};

void write_csv_row(std::ostream& out, const CsvRow& row);
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// "%.16e" so residuals survive a round trip bit for bit.
std::string format_sci(double v);
std::string format_fixed(double v, int digits);

/// One row per iteration, metadata (method, p, n, label, stop) repeated per row.
void write_report_csv(std::ostream& out, const ConvergenceReport& report);
void write_report_csv(const std::filesystem::path& path, const ConvergenceReport& report);
ConvergenceReport read_report_csv(std::istream& in);
ConvergenceReport read_report_csv(const std::filesystem::path& path);

}  // namespace proot
