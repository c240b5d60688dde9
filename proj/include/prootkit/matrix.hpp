#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace proot {

using Rational = boost::rational<std::int64_t>;

/// Raised when operand shapes do not fit the requested operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by LU-based divisions when a pivot falls below the singularity
/// threshold. Carries the zero-based elimination step that failed.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(std::size_t pivot, const std::string& what)
      : std::runtime_error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Dense real matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t n) { return Matrix(n, n); }
  static Matrix diagonal(std::span<const double> d);
  static Matrix diagonal(std::initializer_list<double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Tallies the n^3-order work done through the counted primitives.
///
/// A product of two n x n matrices is charged 2n^3 flops; an LU-based right
/// division (factorization plus n right-hand sides) is charged 8/3 n^3.
/// The estimate is held in thirds of a flop so it stays exact.
class OpCounter {
 public:
  void add_matmul(std::size_t n);
  void add_lu(std::size_t n);

  std::uint64_t matmul_count() const noexcept { return matmuls_; }
  std::uint64_t lu_count() const noexcept { return lus_; }
  std::uint64_t flop_thirds() const noexcept { return thirds_; }
  double flop_estimate() const noexcept { return static_cast<double>(thirds_) / 3.0; }

  /// Differences in counts since `earlier` (a snapshot of this counter).
  OpCounter since(const OpCounter& earlier) const;

  bool operator==(const OpCounter&) const = default;

 private:
  std::uint64_t matmuls_ = 0;
  std::uint64_t lus_ = 0;
  std::uint64_t thirds_ = 0;
};

std::string to_string(const Rational& r);

}  // namespace proot
