#include "leam/optim.hpp"

#include <cmath>

#include "leam/error.hpp"

namespace leam {

void adam_update(Param& p, AdamState& s) {
  if (p.value.rows() != s.m.rows() || p.value.cols() != s.m.cols() ||
      p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) {
    throw ShapeError("adam_update: parameter " + p.value.shape() + " vs state " + s.m.shape());
  }
  ++s.step;
  const AdamConfig& c = s.config;
  const double t = static_cast<double>(s.step);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  auto value = p.value.data();
  auto grad = p.grad.data();
  auto m = s.m.data();
  auto v = s.v.data();
  for (std::size_t i = 0; i < value.size(); ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = m[i] / correct1;
    const double v_hat = v[i] / correct2;
    value[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

}  // namespace leam
