#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "leam/corpus.hpp"
#include "leam/matrix.hpp"
#include "leam/optim.hpp"
#include "leam/prng.hpp"

namespace leam {

/// Which text encoder feeds the classifier.
enum class Variant : std::uint8_t {
  leam = 0,         // cosine compatibility, windowed ReLU scoring, label max-pool, softmax attention
  leam_linear = 1,  // as leam but max-pools raw cosine compatibility (no window, no ReLU)
  swem_mean = 2,    // plain average of word embeddings
  swem_max = 3,     // elementwise max of word embeddings
};

std::string_view to_string(Variant v) noexcept;
Variant parse_variant(std::string_view text);

inline constexpr double kNormFloor = 1e-8;

/// The trainable set {V, C, W1, b1, W2, b2} and the dimensions that fix its shapes.
struct ModelParams {
  Param V;   // P x |vocab|
  Param C;   // P x K
  Param W1;  // (2r+1) x 1
  Param b1;  // K x 1
  Param W2;  // K x P
  Param b2;  // K x 1
  std::size_t r = 0;
  Mode mode = Mode::single;

  std::size_t num_classes() const noexcept { return C.value.cols(); }
  std::size_t dim() const noexcept { return V.value.rows(); }
  std::size_t vocab_size() const noexcept { return V.value.cols(); }
  std::size_t window() const noexcept { return 2 * r + 1; }

  /// Fixed order V, C, W1, b1, W2, b2.
  std::vector<Param*> params();
  std::vector<const Param*> params() const;
  void zero_grads();

  /// Throws ShapeError on any inconsistency, ArgumentError if K < 2.
  void validate() const;
};

/// V from the embedding table, C as given, W1 a centre-tap delta, b1 = b2 = 0,
/// W2 Glorot-uniform.
ModelParams init_params(const EmbeddingTable& words, const Matrix& labels, std::size_t r, Mode mode,
                        Prng& prng);

/// Intermediates of one forward pass over an L-token sequence.
struct ForwardTrace {
  Variant variant = Variant::leam;
  std::vector<std::size_t> tokens;
  std::vector<std::uint8_t> mask;  // 1 for real tokens, 0 for PAD
  Matrix vseq;                     // P x L gathered embeddings
  Vector label_norms;              // ||c_k||
  Vector token_norms;              // ||v_l||
  Matrix G;                        // K x L cosine compatibility
  Matrix pre_activation;           // K x L windowed scores before ReLU
  Matrix u;                        // K x L
  Vector m;                        // per-position max over labels
  std::vector<std::size_t> argmax; // label attaining m_l (lowest index on ties)
  Vector beta;                     // attention over positions
  Vector z;                        // attended representation
  std::vector<std::size_t> pool_source;  // swem_max: position supplying each z entry
  Vector dropout_scale;            // empty when no dropout was applied
  Vector classifier_input;         // z after dropout
  Vector logits;
  Vector probs;

  std::size_t length() const noexcept { return tokens.size(); }
};

// ---------------------------------------------------------------------------
// Components

/// G = (Cᵀ V) ⊘ Ĝ with ĝ_kl = max(||c_k|| ||v_l||, 1e-8).
Matrix compatibility(const Matrix& C, const Matrix& vseq);

/// u_l = ReLU(G_{l-r:l+r} W1 + b1) with zero padding past the sequence ends.
Matrix phrase_compat(const Matrix& G, std::span<const double> W1, std::span<const double> b1,
                     std::size_t r);

/// m_l = max_k u_kl.
Vector label_maxpool(const Matrix& u);

/// Softmax over positions with mask 1; masked positions get exactly 0.
/// Throws ArgumentError when every position is masked.
Vector attention(std::span<const double> m, std::span<const std::uint8_t> mask);

/// z = Σ_l beta_l v_l.
Vector attend(const Matrix& vseq, std::span<const double> beta);

Vector logits(std::span<const double> z, const Matrix& W2, std::span<const double> b2);

/// Softmax (single) or per-label sigmoid (multi) of W2 z + b2.
Vector classify(std::span<const double> z, const Matrix& W2, std::span<const double> b2, Mode mode);
Vector probabilities(std::span<const double> logits, Mode mode);

Matrix gather_columns(const Matrix& V, std::span<const std::size_t> tokens);

// ---------------------------------------------------------------------------
// Full passes

struct ForwardOptions {
  // Multiplies the classifier input entrywise (inverted-dropout mask); length P.
  const Vector* dropout_scale = nullptr;
  // Replaces the computed attention with a uniform distribution over real tokens.
  bool uniform_attention = false;
};

ForwardTrace forward(const ModelParams& params, std::span<const std::size_t> tokens,
                     const ForwardOptions& options = {});
ForwardTrace forward_linear(const ModelParams& params, std::span<const std::size_t> tokens,
                            const ForwardOptions& options = {});
enum class Pool : std::uint8_t { mean, max };
ForwardTrace forward_swem(const ModelParams& params, std::span<const std::size_t> tokens, Pool pool,
                          const ForwardOptions& options = {});

/// Dispatches on variant.
ForwardTrace run_forward(const ModelParams& params, std::span<const std::size_t> tokens, Variant variant,
                         const ForwardOptions& options = {});

/// Inference over many examples; OpenMP across examples.
std::vector<ForwardTrace> forward_batch(const ModelParams& params, std::span<const Example> examples,
                                        Variant variant);

namespace serial {
std::vector<ForwardTrace> forward_batch(const ModelParams& params, std::span<const Example> examples,
                                        Variant variant);
}

// ---------------------------------------------------------------------------
// Parameter accounting

struct ParamCount {
  std::size_t label_embeddings = 0;  // C: K*P
  std::size_t window_weights = 0;    // W1: 2r+1
  std::size_t window_bias = 0;       // b1: K
  std::size_t classifier_weights = 0;
  std::size_t classifier_bias = 0;
  std::size_t word_embeddings = 0;

  std::size_t compositional() const noexcept { return label_embeddings + window_weights + window_bias; }
  /// The leading K*P term alone.
  std::size_t leading_term() const noexcept { return label_embeddings; }
  std::size_t classifier() const noexcept { return classifier_weights + classifier_bias; }
  std::size_t total() const noexcept { return compositional() + classifier() + word_embeddings; }
};

ParamCount count_params(const ModelParams& params);
ParamCount count_params(std::size_t K, std::size_t P, std::size_t r, std::size_t vocab_size);

}  // namespace leam
