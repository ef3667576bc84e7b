#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leam/corpus.hpp"
#include "leam/model.hpp"
#include "leam/optim.hpp"
#include "leam/prng.hpp"

namespace leam {

struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 100;
  std::size_t epochs = 20;
  double dropout_rate = 0.5;
  double reg_weight = 1.0;
  std::size_t window_radius = 50;
  std::uint64_t seed = 1;
  double labeled_fraction = 1.0;
  Variant variant = Variant::leam;
  bool freeze_embeddings = false;
  std::size_t workers = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

inline constexpr double kProbFloor = 1e-12;

// ---------------------------------------------------------------------------
// Losses

/// -log p[target], p clamped below at 1e-12.
double loss_single(std::span<const double> probs, std::size_t target);

/// Mean binary cross-entropy over labels, probabilities clamped to [1e-12, 1-1e-12].
double loss_multi(std::span<const double> probs, std::span<const std::uint8_t> target);

double example_loss(const ForwardTrace& trace, const Target& target, Mode mode);

/// (1/K) Σ_k CE(e_k, classify(c_k)): each label embedding classified as its own class.
double label_reg_loss(const ModelParams& params);

/// Adds d(label_reg_loss)/d{C, W2, b2} times scale to the gradients.
void label_reg_backward(ModelParams& params, double scale);

// ---------------------------------------------------------------------------
// Backward pass

/// Per-example parameter gradients; V is kept sparse as (column, values) pairs.
struct Gradients {
  std::vector<std::pair<std::size_t, Vector>> V;
  Matrix C, W1, b1, W2, b2;
};

struct BackwardOptions {
  double scale = 1.0;  // multiplies dLoss/dlogits (1/batch for mean batch loss)
  bool freeze_embeddings = false;
};

/// Exact reverse pass of example_loss through the trace's variant.
Gradients backward_gradients(const ForwardTrace& trace, const Target& target, const ModelParams& params,
                             const BackwardOptions& options = {});

void accumulate(ModelParams& params, const Gradients& grads);

/// backward_gradients followed by accumulate.
void backward(const ForwardTrace& trace, const Target& target, ModelParams& params,
              const BackwardOptions& options = {});

// ---------------------------------------------------------------------------
// Objective over a batch

struct BatchLoss {
  double data = 0.0;  // mean example loss
  double reg = 0.0;   // label regularizer
  double total = 0.0; // data + reg_weight * reg
};

/// Deterministic (dropout-free) objective.
BatchLoss batch_objective(const ModelParams& params, std::span<const Example> batch, Variant variant,
                          double reg_weight);

/// Accumulates the gradient of the batch objective into params' grads.
/// dropout_scales is empty (no dropout) or one mask per example. Examples
/// are processed by `workers` OpenMP threads; per-example gradients are
/// merged in example order, so the result does not depend on the worker count.
BatchLoss batch_gradients(ModelParams& params, std::span<const Example> batch, Variant variant,
                          double reg_weight, std::span<const Vector> dropout_scales = {},
                          bool freeze_embeddings = false, std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Dropout

/// Inverted-dropout multipliers: 0 with probability rate, 1/(1-rate) otherwise.
Vector dropout_mask(std::size_t n, double rate, Prng& prng);

/// Applies a freshly drawn mask in training mode; identity at inference.
Vector apply_dropout(std::span<const double> x, double rate, Prng& prng, bool training);

// ---------------------------------------------------------------------------
// Training loop

struct EpochLoss {
  double data = 0.0;
  double reg = 0.0;
  double total = 0.0;
};

struct LossReport {
  std::vector<EpochLoss> epochs;
  std::size_t examples_used = 0;
  std::vector<std::string> warnings;

  double data_loss() const { return epochs.empty() ? 0.0 : epochs.back().data; }
  double reg_loss() const { return epochs.empty() ? 0.0 : epochs.back().reg; }
  double total() const { return epochs.empty() ? 0.0 : epochs.back().total; }
};

struct Subsample {
  Dataset data;
  std::vector<std::string> warnings;
};

/// Seeded, class-stratified subset of ceil(N * fraction) examples in original order.
Subsample subsample(const Dataset& data, double fraction, std::uint64_t seed);

/// Minibatch Adam on the total objective. Deterministic for a given seed.
LossReport fit(const Dataset& data, ModelParams& params, const TrainConfig& config);

}  // namespace leam
