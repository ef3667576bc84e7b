#include "leam/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "leam/error.hpp"

namespace leam {

Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f, Matrix& x, double h) {
  if (!(h > 0.0)) throw ArgumentError("finite_diff_grad: step must be positive");
  Matrix grad(x.rows(), x.cols());
  auto values = x.data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double up = f(x);
    values[i] = saved - h;
    const double down = f(x);
    values[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_diff_grad: non-finite objective at entry " + std::to_string(i));
    }
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double max_relative_error(const Matrix& analytic, const Matrix& numeric) {
  if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) {
    throw ShapeError("max_relative_error: " + analytic.shape() + " vs " + numeric.shape());
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i];
    const double n = numeric.data()[i];
    worst = std::max(worst, std::abs(a - n) / std::max(1.0, std::abs(a)));
  }
  return worst;
}

}  // namespace leam
