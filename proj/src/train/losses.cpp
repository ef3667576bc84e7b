#include <algorithm>
#include <cmath>

#include "leam/error.hpp"
#include "leam/train.hpp"

namespace leam {

double loss_single(std::span<const double> probs, std::size_t target) {
  if (target >= probs.size()) {
    throw ArgumentError("target class " + std::to_string(target) + " out of range for " +
                        std::to_string(probs.size()) + " classes");
  }
  return -std::log(std::max(probs[target], kProbFloor));
}

double loss_multi(std::span<const double> probs, std::span<const std::uint8_t> target) {
  if (probs.size() != target.size()) {
    throw ShapeError("loss_multi: " + std::to_string(probs.size()) + " probabilities vs " +
                     std::to_string(target.size()) + " targets");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double p = probs[k];
    s += target[k] ? -std::log(std::max(p, kProbFloor)) : -std::log(std::max(1.0 - p, kProbFloor));
  }
  return s / static_cast<double>(probs.size());
}

double example_loss(const ForwardTrace& trace, const Target& target, Mode mode) {
  return mode == Mode::single ? loss_single(trace.probs, target.label) : loss_multi(trace.probs, target.labels);
}

namespace {

std::vector<std::uint8_t> indicator(std::size_t K, std::size_t k) {
  std::vector<std::uint8_t> e(K, 0);
  e[k] = 1;
  return e;
}

}  // namespace

double label_reg_loss(const ModelParams& params) {
  const std::size_t K = params.num_classes();
  double s = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const Vector c = params.C.value.col(k);
    const Vector p = classify(c, params.W2.value, params.b2.value.data(), params.mode);
    s += params.mode == Mode::single ? loss_single(p, k) : loss_multi(p, indicator(K, k));
  }
  return s / static_cast<double>(K);
}

void label_reg_backward(ModelParams& params, double scale) {
  const std::size_t K = params.num_classes(), P = params.dim();
  const double per_label = params.mode == Mode::single ? 1.0 : 1.0 / static_cast<double>(K);
  const double weight = scale * per_label / static_cast<double>(K);
  const Matrix& W2 = params.W2.value;
  for (std::size_t k = 0; k < K; ++k) {
    const Vector c = params.C.value.col(k);
    const Vector p = classify(c, W2, params.b2.value.data(), params.mode);
    for (std::size_t j = 0; j < K; ++j) {
      const double d = weight * (p[j] - (j == k ? 1.0 : 0.0));
      params.b2.grad(j, 0) += d;
      for (std::size_t q = 0; q < P; ++q) {
        params.W2.grad(j, q) += d * c[q];
        params.C.grad(q, k) += d * W2(j, q);
      }
    }
  }
}

}  // namespace leam
