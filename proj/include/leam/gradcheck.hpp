#pragma once

#include <functional>

#include "leam/matrix.hpp"

namespace leam {

/// Central-difference gradient of f with respect to every entry of x.
///
/// x is perturbed in place and restored after each probe, so f may read it
/// either through its argument or through any alias (for example a model
/// parameter that x refers to). Throws NumericError if f returns a
/// non-finite value and ArgumentError if h <= 0.
Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f, Matrix& x, double h);

/// |a - n| / max(1, |a|), maximized over entries.
double max_relative_error(const Matrix& analytic, const Matrix& numeric);

}  // namespace leam
