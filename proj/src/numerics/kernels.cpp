#include "leam/kernels.hpp"

#include <cmath>

#include <omp.h>

#include "leam/error.hpp"

namespace leam::kernels {
namespace {

// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::size_t kParallelWork = 1 << 14;

void check_product(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul shape mismatch: " + a.shape() + " * " + b.shape());
  }
}

void check_product_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn shape mismatch: " + a.shape() + "^T * " + b.shape());
  }
}

}  // namespace

int max_threads() noexcept { return omp_get_max_threads(); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_product(a, b);
  const std::size_t n = a.rows(), inner = a.cols(), m = b.cols();
  Matrix c(n, m);
  const bool wide = n * inner * m >= kParallelWork;
#pragma omp parallel for schedule(static) if (wide)
  for (std::size_t i = 0; i < n; ++i) {
    double* out = c.row(i).data();
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = a(i, k);
      const double* brow = b.row(k).data();
      for (std::size_t j = 0; j < m; ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_product_tn(a, b);
  const std::size_t n = a.cols(), inner = a.rows(), m = b.cols();
  Matrix c(n, m);
  const bool wide = n * inner * m >= kParallelWork;
#pragma omp parallel for schedule(static) if (wide)
  for (std::size_t i = 0; i < n; ++i) {
    double* out = c.row(i).data();
    for (std::size_t k = 0; k < inner; ++k) {
      const double aki = a(k, i);
      const double* brow = b.row(k).data();
      for (std::size_t j = 0; j < m; ++j) out[j] += aki * brow[j];
    }
  }
  return c;
}

Vector column_norms(const Matrix& a) {
  const std::size_t rows = a.rows(), cols = a.cols();
  Vector sq(cols, 0.0);
  const bool wide = rows * cols >= kParallelWork;
#pragma omp parallel for schedule(static) if (wide)
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += a(r, j) * a(r, j);
    sq[j] = std::sqrt(s);
  }
  return sq;
}

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_product(a, b);
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_product_tn(a, b);
  Matrix c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t k = 0; k < a.rows(); ++k) {
      const double aki = a(k, i);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
    }
  }
  return c;
}

Vector column_norms(const Matrix& a) {
  Vector out(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, j) * a(r, j);
    out[j] = std::sqrt(s);
  }
  return out;
}

}  // namespace serial
}  // namespace leam::kernels
