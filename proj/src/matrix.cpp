#include "prootkit/matrix.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace proot {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows()
        << "x" << b.cols();
    throw DimensionError(msg.str());
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Matrix: entry count does not match rows * cols");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> d) {
  return diagonal(std::span<const double>(d.begin(), d.size()));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(),
                 std::plus<>());
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(),
                 std::minus<>());
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

void OpCounter::add_matmul(std::size_t n) {
  const auto n3 = static_cast<std::uint64_t>(n) * n * n;
  ++matmuls_;
  thirds_ += 6 * n3;
}

void OpCounter::add_lu(std::size_t n) {
  const auto n3 = static_cast<std::uint64_t>(n) * n * n;
  ++lus_;
  thirds_ += 8 * n3;
}

OpCounter OpCounter::since(const OpCounter& earlier) const {
  OpCounter d;
  d.matmuls_ = matmuls_ - earlier.matmuls_;
  d.lus_ = lus_ - earlier.lus_;
  d.thirds_ = thirds_ - earlier.thirds_;
  return d;
}

std::string to_string(const Rational& r) {
  std::ostringstream s;
  s << r.numerator();
  if (r.denominator() != 1) s << '/' << r.denominator();
  return s.str();
}

}  // namespace proot
