#include "leam/model.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "leam/error.hpp"
#include "leam/kernels.hpp"

namespace leam {

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::leam: return "leam";
    case Variant::leam_linear: return "leam_linear";
    case Variant::swem_mean: return "swem_mean";
    case Variant::swem_max: return "swem_max";
  }
  return "unknown";
}

Variant parse_variant(std::string_view text) {
  for (auto v : {Variant::leam, Variant::leam_linear, Variant::swem_mean, Variant::swem_max}) {
    if (text == to_string(v)) return v;
  }
  throw ConfigError("unknown variant '" + std::string(text) +
                    "' (expected leam, leam_linear, swem_mean or swem_max)");
}

std::vector<Param*> ModelParams::params() { return {&V, &C, &W1, &b1, &W2, &b2}; }

std::vector<const Param*> ModelParams::params() const { return {&V, &C, &W1, &b1, &W2, &b2}; }

void ModelParams::zero_grads() {
  for (Param* p : params()) p->zero_grad();
}

void ModelParams::validate() const {
  const std::size_t K = C.value.cols(), P = V.value.rows();
  auto expect = [](const Param& p, std::size_t rows, std::size_t cols, const char* name) {
    if (p.value.rows() != rows || p.value.cols() != cols) {
      throw ShapeError(std::string(name) + " has shape " + p.value.shape() + ", expected (" +
                       std::to_string(rows) + "x" + std::to_string(cols) + ")");
    }
    if (p.grad.rows() != rows || p.grad.cols() != cols) {
      throw ShapeError(std::string(name) + " gradient shape " + p.grad.shape() + " differs from value");
    }
  };
  if (K < 2) throw ArgumentError("a model needs at least 2 classes, got " + std::to_string(K));
  expect(V, P, V.value.cols(), "V");
  expect(C, P, K, "C");
  expect(W1, window(), 1, "W1");
  expect(b1, K, 1, "b1");
  expect(W2, K, P, "W2");
  expect(b2, K, 1, "b2");
}

ModelParams init_params(const EmbeddingTable& words, const Matrix& labels, std::size_t r, Mode mode,
                        Prng& prng) {
  const std::size_t P = words.dim(), K = labels.cols();
  if (labels.rows() != P) {
    throw ShapeError("label embeddings " + labels.shape() + " do not match word dimension " +
                     std::to_string(P));
  }
  ModelParams p;
  p.r = r;
  p.mode = mode;
  p.V = Param(words.vectors);
  p.C = Param(labels);
  Matrix w1(2 * r + 1, 1);
  w1(r, 0) = 1.0;
  p.W1 = Param(std::move(w1));
  p.b1 = Param(Matrix(K, 1));
  const double limit = std::sqrt(6.0 / static_cast<double>(K + P));
  Matrix w2(K, P);
  for (double& x : w2.data()) x = prng.uniform(-limit, limit);
  p.W2 = Param(std::move(w2));
  p.b2 = Param(Matrix(K, 1));
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

Matrix gather_columns(const Matrix& V, std::span<const std::size_t> tokens) {
  Matrix out(V.rows(), tokens.size());
  for (std::size_t l = 0; l < tokens.size(); ++l) {
    if (tokens[l] >= V.cols()) {
      throw ArgumentError("token index " + std::to_string(tokens[l]) + " outside vocabulary of " +
                          std::to_string(V.cols()));
    }
    for (std::size_t r = 0; r < V.rows(); ++r) out(r, l) = V(r, tokens[l]);
  }
  return out;
}

namespace {

Matrix cosine_from_products(Matrix products, const Vector& label_norms, const Vector& token_norms) {
  for (std::size_t k = 0; k < products.rows(); ++k) {
    for (std::size_t l = 0; l < products.cols(); ++l) {
      products(k, l) /= std::max(label_norms[k] * token_norms[l], kNormFloor);
    }
  }
  return products;
}

Matrix windowed_scores(const Matrix& G, std::span<const double> W1, std::span<const double> b1,
                       std::size_t r) {
  const std::size_t K = G.rows(), L = G.cols();
  if (W1.size() != 2 * r + 1) {
    throw ShapeError("W1 has length " + std::to_string(W1.size()) + ", window needs " +
                     std::to_string(2 * r + 1));
  }
  if (b1.size() != K) {
    throw ShapeError("b1 has length " + std::to_string(b1.size()) + ", expected " + std::to_string(K));
  }
  Matrix a(K, L);
  const auto signed_r = static_cast<std::ptrdiff_t>(r);
  const auto signed_L = static_cast<std::ptrdiff_t>(L);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::ptrdiff_t l = 0; l < signed_L; ++l) {
      double s = 0.0;
      for (std::ptrdiff_t j = 0; j <= 2 * signed_r; ++j) {
        const std::ptrdiff_t pos = l - signed_r + j;
        if (pos < 0 || pos >= signed_L) continue;
        s += G(k, static_cast<std::size_t>(pos)) * W1[static_cast<std::size_t>(j)];
      }
      a(k, static_cast<std::size_t>(l)) = s + b1[k];
    }
  }
  return a;
}

void maxpool_into(const Matrix& u, Vector& m, std::vector<std::size_t>& argmax) {
  const std::size_t K = u.rows(), L = u.cols();
  m.assign(L, 0.0);
  argmax.assign(L, 0);
  for (std::size_t l = 0; l < L; ++l) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k) {
      if (u(k, l) > u(best, l)) best = k;
    }
    argmax[l] = best;
    m[l] = K == 0 ? 0.0 : u(best, l);
  }
}

Vector uniform_over(std::span<const std::uint8_t> mask) {
  const auto real = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
  if (real == 0) throw ArgumentError("attention over a sequence with no real tokens");
  Vector beta(mask.size(), 0.0);
  const double w = 1.0 / static_cast<double>(real);
  for (std::size_t l = 0; l < mask.size(); ++l) {
    if (mask[l]) beta[l] = w;
  }
  return beta;
}

ForwardTrace start_trace(const ModelParams& params, std::span<const std::size_t> tokens, Variant variant) {
  if (tokens.empty()) throw ArgumentError("forward needs at least one token");
  ForwardTrace t;
  t.variant = variant;
  t.tokens.assign(tokens.begin(), tokens.end());
  t.mask.resize(tokens.size());
  for (std::size_t l = 0; l < tokens.size(); ++l) t.mask[l] = tokens[l] != Vocabulary::kPad ? 1 : 0;
  t.vseq = gather_columns(params.V.value, tokens);
  // PAD is a constant zero vector whatever its stored column holds.
  for (std::size_t l = 0; l < tokens.size(); ++l) {
    if (t.mask[l]) continue;
    for (std::size_t r = 0; r < t.vseq.rows(); ++r) t.vseq(r, l) = 0.0;
  }
  return t;
}

void finish_trace(const ModelParams& params, ForwardTrace& t, const ForwardOptions& options) {
  t.classifier_input = t.z;
  if (options.dropout_scale) {
    if (options.dropout_scale->size() != t.z.size()) {
      throw ShapeError("dropout mask length " + std::to_string(options.dropout_scale->size()) +
                       " does not match representation length " + std::to_string(t.z.size()));
    }
    t.dropout_scale = *options.dropout_scale;
    for (std::size_t i = 0; i < t.z.size(); ++i) t.classifier_input[i] *= t.dropout_scale[i];
  }
  t.logits = logits(t.classifier_input, params.W2.value, params.b2.value.data());
  t.probs = probabilities(t.logits, params.mode);
}

ForwardTrace attentive_forward(const ModelParams& params, std::span<const std::size_t> tokens,
                               const ForwardOptions& options, bool windowed) {
  ForwardTrace t = start_trace(params, tokens, windowed ? Variant::leam : Variant::leam_linear);
  t.label_norms = kernels::column_norms(params.C.value);
  t.token_norms = kernels::column_norms(t.vseq);
  t.G = cosine_from_products(kernels::matmul_tn(params.C.value, t.vseq), t.label_norms, t.token_norms);
  if (windowed) {
    t.pre_activation = windowed_scores(t.G, params.W1.value.data(), params.b1.value.data(), params.r);
    t.u = relu(t.pre_activation);
  } else {
    t.pre_activation = t.G;
    t.u = t.G;
  }
  maxpool_into(t.u, t.m, t.argmax);
  t.beta = options.uniform_attention ? uniform_over(t.mask) : attention(t.m, t.mask);
  t.z = attend(t.vseq, t.beta);
  finish_trace(params, t, options);
  return t;
}

}  // namespace

Matrix compatibility(const Matrix& C, const Matrix& vseq) {
  if (C.rows() != vseq.rows()) {
    throw ShapeError("compatibility: label embeddings " + C.shape() + " vs words " + vseq.shape());
  }
  return cosine_from_products(kernels::matmul_tn(C, vseq), kernels::column_norms(C),
                              kernels::column_norms(vseq));
}

Matrix phrase_compat(const Matrix& G, std::span<const double> W1, std::span<const double> b1,
                     std::size_t r) {
  return relu(windowed_scores(G, W1, b1, r));
}

Vector label_maxpool(const Matrix& u) {
  if (u.rows() == 0) throw ArgumentError("label_maxpool needs at least one label");
  Vector m;
  std::vector<std::size_t> argmax;
  maxpool_into(u, m, argmax);
  return m;
}

Vector attention(std::span<const double> m, std::span<const std::uint8_t> mask) {
  if (m.size() != mask.size()) throw ShapeError("attention: scores and mask lengths differ");
  Vector real;
  for (std::size_t l = 0; l < m.size(); ++l) {
    if (mask[l]) real.push_back(m[l]);
  }
  if (real.empty()) throw ArgumentError("attention over a sequence with no real tokens");
  const Vector weights = softmax(real);
  Vector beta(m.size(), 0.0);
  for (std::size_t l = 0, i = 0; l < m.size(); ++l) {
    if (mask[l]) beta[l] = weights[i++];
  }
  return beta;
}

Vector attend(const Matrix& vseq, std::span<const double> beta) {
  if (vseq.cols() != beta.size()) {
    throw ShapeError("attend: " + vseq.shape() + " against " + std::to_string(beta.size()) + " weights");
  }
  Vector z(vseq.rows(), 0.0);
  for (std::size_t p = 0; p < vseq.rows(); ++p) {
    double s = 0.0;
    for (std::size_t l = 0; l < beta.size(); ++l) s += beta[l] * vseq(p, l);
    z[p] = s;
  }
  return z;
}

Vector logits(std::span<const double> z, const Matrix& W2, std::span<const double> b2) {
  if (W2.cols() != z.size() || W2.rows() != b2.size()) {
    throw ShapeError("classifier " + W2.shape() + " with bias of " + std::to_string(b2.size()) +
                     " against input of length " + std::to_string(z.size()));
  }
  Vector out(W2.rows());
  for (std::size_t k = 0; k < W2.rows(); ++k) out[k] = dot(W2.row(k), z) + b2[k];
  return out;
}

Vector probabilities(std::span<const double> logit_values, Mode mode) {
  if (mode == Mode::single) return softmax(logit_values);
  Vector out(logit_values.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = sigmoid(logit_values[k]);
  return out;
}

Vector classify(std::span<const double> z, const Matrix& W2, std::span<const double> b2, Mode mode) {
  return probabilities(logits(z, W2, b2), mode);
}

ForwardTrace forward(const ModelParams& params, std::span<const std::size_t> tokens,
                     const ForwardOptions& options) {
  return attentive_forward(params, tokens, options, true);
}

ForwardTrace forward_linear(const ModelParams& params, std::span<const std::size_t> tokens,
                            const ForwardOptions& options) {
  return attentive_forward(params, tokens, options, false);
}

ForwardTrace forward_swem(const ModelParams& params, std::span<const std::size_t> tokens, Pool pool,
                          const ForwardOptions& options) {
  ForwardTrace t = start_trace(params, tokens, pool == Pool::mean ? Variant::swem_mean : Variant::swem_max);
  t.beta = uniform_over(t.mask);
  if (pool == Pool::mean) {
    t.z = attend(t.vseq, t.beta);
  } else {
    const std::size_t P = t.vseq.rows();
    t.z.assign(P, 0.0);
    t.pool_source.assign(P, 0);
    for (std::size_t p = 0; p < P; ++p) {
      bool first = true;
      for (std::size_t l = 0; l < t.length(); ++l) {
        if (!t.mask[l]) continue;
        if (first || t.vseq(p, l) > t.z[p]) {
          t.z[p] = t.vseq(p, l);
          t.pool_source[p] = l;
          first = false;
        }
      }
    }
  }
  finish_trace(params, t, options);
  return t;
}

ForwardTrace run_forward(const ModelParams& params, std::span<const std::size_t> tokens, Variant variant,
                         const ForwardOptions& options) {
  switch (variant) {
    case Variant::leam: return forward(params, tokens, options);
    case Variant::leam_linear: return forward_linear(params, tokens, options);
    case Variant::swem_mean: return forward_swem(params, tokens, Pool::mean, options);
    case Variant::swem_max: return forward_swem(params, tokens, Pool::max, options);
  }
  throw ArgumentError("unknown variant");
}

std::vector<ForwardTrace> forward_batch(const ModelParams& params, std::span<const Example> examples,
                                        Variant variant) {
  std::vector<ForwardTrace> out(examples.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(examples.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_forward(params, examples[static_cast<std::size_t>(i)].tokens, variant);
    } catch (...) {
#pragma omp critical(leam_forward_batch_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace serial {
std::vector<ForwardTrace> forward_batch(const ModelParams& params, std::span<const Example> examples,
                                        Variant variant) {
  std::vector<ForwardTrace> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(run_forward(params, ex.tokens, variant));
  return out;
}
}  // namespace serial

ParamCount count_params(std::size_t K, std::size_t P, std::size_t r, std::size_t vocab_size) {
  ParamCount c;
  c.label_embeddings = K * P;
  c.window_weights = 2 * r + 1;
  c.window_bias = K;
  c.classifier_weights = K * P;
  c.classifier_bias = K;
  c.word_embeddings = P * vocab_size;
  return c;
}

ParamCount count_params(const ModelParams& params) {
  return count_params(params.num_classes(), params.dim(), params.r, params.vocab_size());
}

}  // namespace leam
