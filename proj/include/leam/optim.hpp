#pragma once

#include <cstddef>

#include "leam/matrix.hpp"

namespace leam {

/// A trainable tensor and its accumulated gradient.
struct Param {
  Matrix value;
  Matrix grad;

  Param() = default;
  explicit Param(Matrix v) : value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad.fill(0.0); }
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates for one Param.
struct AdamState {
  Matrix m;
  Matrix v;
  std::size_t step = 0;
  AdamConfig config;

  AdamState() = default;
  AdamState(const Param& p, AdamConfig cfg)
      : m(p.value.rows(), p.value.cols()), v(p.value.rows(), p.value.cols()), config(cfg) {}
};

/// One bias-corrected Adam step. Reads p.grad, leaves it untouched.
void adam_update(Param& p, AdamState& s);

}  // namespace leam
