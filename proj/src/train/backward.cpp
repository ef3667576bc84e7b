#include <algorithm>
#include <exception>

#include <omp.h>

#include "leam/error.hpp"
#include "leam/train.hpp"

namespace leam {
namespace {

Vector output_delta(const ForwardTrace& trace, const Target& target, Mode mode, double scale) {
  const std::size_t K = trace.probs.size();
  Vector d(K);
  if (mode == Mode::single) {
    for (std::size_t k = 0; k < K; ++k) d[k] = scale * (trace.probs[k] - (k == target.label ? 1.0 : 0.0));
  } else {
    if (target.labels.size() != K) throw ShapeError("multi-label target length differs from K");
    const double per_label = scale / static_cast<double>(K);
    for (std::size_t k = 0; k < K; ++k) d[k] = per_label * (trace.probs[k] - target.labels[k]);
  }
  return d;
}

// Gradient of G = (Cᵀ V) ⊘ Ĝ back onto label and token vectors.
void cosine_backward(const ForwardTrace& t, const Matrix& C, const Matrix& dG, Matrix& dC,
                     std::vector<Vector>& dv) {
  const std::size_t K = dG.rows(), L = dG.cols(), P = C.rows();
  for (std::size_t l = 0; l < L; ++l) {
    if (!t.mask[l]) continue;  // PAD is a constant zero vector
    for (std::size_t k = 0; k < K; ++k) {
      const double g = dG(k, l);
      if (g == 0.0) continue;
      const double nc = t.label_norms[k], nv = t.token_norms[l];
      const double denom = nc * nv;
      if (denom > kNormFloor) {
        const double cos = t.G(k, l);
        const double to_c = cos / (nc * nc), to_v = cos / (nv * nv);
        for (std::size_t p = 0; p < P; ++p) {
          const double c = C(p, k), v = t.vseq(p, l);
          dC(p, k) += g * (v / denom - to_c * c);
          dv[l][p] += g * (c / denom - to_v * v);
        }
      } else {
        for (std::size_t p = 0; p < P; ++p) {
          dC(p, k) += g * t.vseq(p, l) / kNormFloor;
          dv[l][p] += g * C(p, k) / kNormFloor;
        }
      }
    }
  }
}

}  // namespace

Gradients backward_gradients(const ForwardTrace& t, const Target& target, const ModelParams& params,
                             const BackwardOptions& options) {
  const std::size_t K = params.num_classes(), P = params.dim(), L = t.length();
  if (t.probs.size() != K || t.z.size() != P || t.vseq.rows() != P) {
    throw ShapeError("backward: trace does not match parameters (K=" + std::to_string(K) +
                     ", P=" + std::to_string(P) + ")");
  }
  Gradients g{{}, Matrix(P, K), Matrix(params.window(), 1), Matrix(K, 1), Matrix(K, P), Matrix(K, 1)};

  // Classifier.
  const Vector dl = output_delta(t, target, params.mode, options.scale);
  Vector dz(P, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    g.b2(k, 0) += dl[k];
    for (std::size_t p = 0; p < P; ++p) {
      g.W2(k, p) += dl[k] * t.classifier_input[p];
      dz[p] += dl[k] * params.W2.value(k, p);
    }
  }
  if (!t.dropout_scale.empty()) {
    for (std::size_t p = 0; p < P; ++p) dz[p] *= t.dropout_scale[p];
  }

  std::vector<Vector> dv(L, Vector(P, 0.0));
  switch (t.variant) {
    case Variant::swem_max:
      for (std::size_t p = 0; p < P; ++p) dv[t.pool_source[p]][p] += dz[p];
      break;
    case Variant::swem_mean:
      for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t p = 0; p < P; ++p) dv[l][p] += t.beta[l] * dz[p];
      }
      break;
    case Variant::leam:
    case Variant::leam_linear: {
      // z = Σ beta_l v_l
      Vector dbeta(L, 0.0);
      for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t p = 0; p < P; ++p) dv[l][p] += t.beta[l] * dz[p];
        dbeta[l] = dot(t.vseq.col(l), dz);
      }
      // masked softmax
      double mean = 0.0;
      for (std::size_t l = 0; l < L; ++l) mean += t.beta[l] * dbeta[l];
      Matrix dG(K, L);
      Matrix du(K, L);
      for (std::size_t l = 0; l < L; ++l) {
        const double dm = t.mask[l] ? t.beta[l] * (dbeta[l] - mean) : 0.0;
        du(t.argmax[l], l) += dm;  // max-pool routes to the lowest maximizing label
      }
      if (t.variant == Variant::leam_linear) {
        dG = du;
      } else {
        const auto r = static_cast<std::ptrdiff_t>(params.r);
        const auto len = static_cast<std::ptrdiff_t>(L);
        const Matrix& W1 = params.W1.value;
        for (std::size_t k = 0; k < K; ++k) {
          for (std::ptrdiff_t l = 0; l < len; ++l) {
            const auto lu = static_cast<std::size_t>(l);
            if (!(t.pre_activation(k, lu) > 0.0)) continue;
            const double da = du(k, lu);
            if (da == 0.0) continue;
            g.b1(k, 0) += da;
            for (std::ptrdiff_t j = 0; j <= 2 * r; ++j) {
              const std::ptrdiff_t pos = l - r + j;
              if (pos < 0 || pos >= len) continue;
              const auto ju = static_cast<std::size_t>(j), pu = static_cast<std::size_t>(pos);
              g.W1(ju, 0) += da * t.G(k, pu);
              dG(k, pu) += da * W1(ju, 0);
            }
          }
        }
      }
      cosine_backward(t, params.C.value, dG, g.C, dv);
      break;
    }
  }

  if (!options.freeze_embeddings) {
    g.V.reserve(L);
    for (std::size_t l = 0; l < L; ++l) {
      if (t.mask[l]) g.V.emplace_back(t.tokens[l], std::move(dv[l]));
    }
  }
  return g;
}

void accumulate(ModelParams& params, const Gradients& grads) {
  Matrix& dV = params.V.grad;
  for (const auto& [col, values] : grads.V) {
    for (std::size_t p = 0; p < values.size(); ++p) dV(p, col) += values[p];
  }
  auto add = [](Matrix& into, const Matrix& from) {
    auto a = into.data();
    auto b = from.data();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  add(params.C.grad, grads.C);
  add(params.W1.grad, grads.W1);
  add(params.b1.grad, grads.b1);
  add(params.W2.grad, grads.W2);
  add(params.b2.grad, grads.b2);
}

void backward(const ForwardTrace& trace, const Target& target, ModelParams& params,
              const BackwardOptions& options) {
  accumulate(params, backward_gradients(trace, target, params, options));
}

BatchLoss batch_objective(const ModelParams& params, std::span<const Example> batch, Variant variant,
                          double reg_weight) {
  if (batch.empty()) throw ArgumentError("objective over an empty batch");
  BatchLoss out;
  for (const auto& ex : batch) {
    out.data += example_loss(run_forward(params, ex.tokens, variant), ex.target, params.mode);
  }
  out.data /= static_cast<double>(batch.size());
  out.reg = label_reg_loss(params);
  out.total = out.data + reg_weight * out.reg;
  return out;
}

BatchLoss batch_gradients(ModelParams& params, std::span<const Example> batch, Variant variant,
                          double reg_weight, std::span<const Vector> dropout_scales,
                          bool freeze_embeddings, std::size_t workers) {
  const std::size_t n = batch.size();
  if (n == 0) throw ArgumentError("gradients over an empty batch");
  if (!dropout_scales.empty() && dropout_scales.size() != n) {
    throw ShapeError("one dropout mask per example required");
  }
  const BackwardOptions options{1.0 / static_cast<double>(n), freeze_embeddings};
  std::vector<Gradients> grads(n);
  Vector losses(n);
  std::exception_ptr failure;
  const ModelParams& frozen = params;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(std::max<std::size_t>(workers, 1)))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      ForwardOptions fo;
      if (!dropout_scales.empty()) fo.dropout_scale = &dropout_scales[idx];
      const ForwardTrace trace = run_forward(frozen, batch[idx].tokens, variant, fo);
      losses[idx] = example_loss(trace, batch[idx].target, frozen.mode);
      grads[idx] = backward_gradients(trace, batch[idx].target, frozen, options);
    } catch (...) {
#pragma omp critical(leam_batch_gradients_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  BatchLoss out;
  for (std::size_t i = 0; i < n; ++i) {
    accumulate(params, grads[i]);
    out.data += losses[i];
  }
  out.data /= static_cast<double>(n);
  out.reg = label_reg_loss(params);
  if (reg_weight != 0.0) label_reg_backward(params, reg_weight);
  out.total = out.data + reg_weight * out.reg;
  return out;
}

}  // namespace leam
