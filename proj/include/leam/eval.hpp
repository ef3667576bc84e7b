#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "leam/checkpoint.hpp"
#include "leam/corpus.hpp"
#include "leam/matrix.hpp"

namespace leam {

enum class Averaging : std::uint8_t { micro, macro };

inline constexpr double kDecisionThreshold = 0.5;

/// Fraction of exact matches. Throws ArgumentError on empty or unequal inputs.
double accuracy(std::span<const std::size_t> preds, std::span<const std::size_t> targets);

/// F1 after binarizing scores at `threshold`. Targets are 0/1 entries of an
/// N x K matrix. A label with no TP, FP or FN has F1 0.
double f1(const Matrix& scores, const Matrix& targets, Averaging averaging,
          double threshold = kDecisionThreshold);

/// Per-label F1 at the threshold.
Vector f1_per_label(const Matrix& scores, const Matrix& targets, double threshold = kDecisionThreshold);

/// Rank (Mann-Whitney) AUC with midranks for ties. Micro pools every
/// (example, label) pair; macro averages labels having both classes present.
/// nullopt when no valid pair/label exists.
std::optional<double> auc(const Matrix& scores, const Matrix& targets, Averaging averaging);

/// AUC of one score list against 0/1 labels; nullopt if either class is absent.
std::optional<double> binary_auc(std::span<const double> scores, std::span<const double> labels);

/// Fraction of the n highest scores (ties to the lower index) whose target is 1.
double precision_at_n(std::span<const double> scores, std::span<const double> target, std::size_t n);

/// Mean precision_at_n over rows.
double mean_precision_at_n(const Matrix& scores, const Matrix& targets, std::size_t n);

struct MetricsReport {
  Mode mode = Mode::single;
  std::size_t examples = 0;
  std::optional<double> accuracy;
  std::optional<double> micro_f1, macro_f1, micro_auc, macro_auc;
  std::map<std::size_t, double> p_at_n;
  std::vector<std::string> label_names;
  Vector per_class;  // recall (single) or F1 (multi) per label

  /// Flat object: metric name -> number, or "undefined" for missing values.
  nlohmann::json to_json() const;
};

/// Class probabilities for every example (N x K), inference mode.
Matrix predict_scores(const Model& model, const Dataset& data);

Matrix target_matrix(const Dataset& data);
std::vector<std::size_t> argmax_rows(const Matrix& scores);

MetricsReport evaluate(const Model& model, const Dataset& data, const std::vector<std::size_t>& p_at_n = {1, 3, 5});
MetricsReport evaluate_scores(const Matrix& scores, const Dataset& data, const std::vector<std::size_t>& p_at_n);

/// Cosine between per-class mean representation (rows) and label embedding (columns).
struct ClassCenterSimilarity {
  Matrix cosine;            // K x K
  std::vector<bool> defined;  // false for classes with no examples
};

ClassCenterSimilarity class_center_similarity(const Model& model, const Dataset& data);

/// The same matrix from already-computed class means (P x K) and labels (P x K).
Matrix center_cosines(const Matrix& centers, const Matrix& labels);

}  // namespace leam
