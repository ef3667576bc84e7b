#pragma once

#include "leam/matrix.hpp"

// Data-parallel dense kernels. Every OpenMP kernel partitions over output
// rows and keeps the serial reduction order, so results are bit-identical to
// the serial reference regardless of thread count.
namespace leam::kernels {

Matrix matmul(const Matrix& a, const Matrix& b);

// aᵀ·b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

// Norm of every column of a.
Vector column_norms(const Matrix& a);

int max_threads() noexcept;

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Vector column_norms(const Matrix& a);

}  // namespace serial
}  // namespace leam::kernels
