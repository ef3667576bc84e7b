#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace leam {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Builds from nested rows; all rows must have equal length.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix column(std::span<const double> values);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  Vector col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const double> values);

  void fill(double value);
  bool all_finite() const noexcept;
  std::string shape() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);

/// Standard product a·b; throws ShapeError naming both shapes on mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

/// Elementwise max(0, x).
Matrix relu(const Matrix& x);

/// Numerically stable softmax (max-subtracted). Throws ArgumentError on empty input.
Vector softmax(std::span<const double> v);

/// Stable logistic function.
double sigmoid(double x) noexcept;

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double l2_norm(std::span<const double> a) noexcept;

/// Cosine similarity with the product of norms floored at eps.
double cosine(std::span<const double> a, std::span<const double> b, double eps = 1e-8) noexcept;

}  // namespace leam
