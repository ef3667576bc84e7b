#include <algorithm>
#include <numeric>

#include "leam/error.hpp"
#include "leam/eval.hpp"
#include "leam/model.hpp"

namespace leam {
namespace {

void check_same_shape(const Matrix& scores, const Matrix& targets, const char* what) {
  if (scores.rows() != targets.rows() || scores.cols() != targets.cols()) {
    throw ShapeError(std::string(what) + ": scores " + scores.shape() + " vs targets " + targets.shape());
  }
}

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

double f1_of(const Counts& c) {
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::vector<Counts> label_counts(const Matrix& scores, const Matrix& targets, double threshold) {
  std::vector<Counts> counts(scores.cols());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    for (std::size_t k = 0; k < scores.cols(); ++k) {
      const bool predicted = scores(i, k) >= threshold;
      const bool actual = targets(i, k) != 0.0;
      if (predicted && actual) ++counts[k].tp;
      else if (predicted) ++counts[k].fp;
      else if (actual) ++counts[k].fn;
    }
  }
  return counts;
}

}  // namespace

double accuracy(std::span<const std::size_t> preds, std::span<const std::size_t> targets) {
  if (preds.size() != targets.size()) throw ArgumentError("accuracy: prediction and target counts differ");
  if (preds.empty()) throw ArgumentError("accuracy of an empty prediction set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == targets[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

Vector f1_per_label(const Matrix& scores, const Matrix& targets, double threshold) {
  check_same_shape(scores, targets, "f1");
  const auto counts = label_counts(scores, targets, threshold);
  Vector out;
  for (const auto& c : counts) out.push_back(f1_of(c));
  return out;
}

double f1(const Matrix& scores, const Matrix& targets, Averaging averaging, double threshold) {
  check_same_shape(scores, targets, "f1");
  const auto counts = label_counts(scores, targets, threshold);
  if (averaging == Averaging::micro) {
    Counts pooled;
    for (const auto& c : counts) {
      pooled.tp += c.tp;
      pooled.fp += c.fp;
      pooled.fn += c.fn;
    }
    return f1_of(pooled);
  }
  if (counts.empty()) return 0.0;
  double s = 0.0;
  for (const auto& c : counts) s += f1_of(c);
  return s / static_cast<double>(counts.size());
}

std::optional<double> binary_auc(std::span<const double> scores, std::span<const double> labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] != 0.0) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const double np = static_cast<double>(positives), nn = static_cast<double>(negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::optional<double> auc(const Matrix& scores, const Matrix& targets, Averaging averaging) {
  check_same_shape(scores, targets, "auc");
  if (averaging == Averaging::micro) return binary_auc(scores.data(), targets.data());
  double s = 0.0;
  std::size_t valid = 0;
  for (std::size_t k = 0; k < scores.cols(); ++k) {
    const auto a = binary_auc(scores.col(k), targets.col(k));
    if (a) {
      s += *a;
      ++valid;
    }
  }
  if (valid == 0) return std::nullopt;
  return s / static_cast<double>(valid);
}

double precision_at_n(std::span<const double> scores, std::span<const double> target, std::size_t n) {
  if (scores.size() != target.size()) throw ShapeError("precision_at_n: scores and target lengths differ");
  if (n < 1 || n > scores.size()) {
    throw ArgumentError("precision_at_n: n=" + std::to_string(n) + " outside [1, " +
                        std::to_string(scores.size()) + "]");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += target[order[i]] != 0.0 ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(n);
}

double mean_precision_at_n(const Matrix& scores, const Matrix& targets, std::size_t n) {
  check_same_shape(scores, targets, "precision_at_n");
  if (scores.rows() == 0) throw ArgumentError("precision_at_n over no examples");
  double s = 0.0;
  for (std::size_t i = 0; i < scores.rows(); ++i) s += precision_at_n(scores.row(i), targets.row(i), n);
  return s / static_cast<double>(scores.rows());
}

Matrix predict_scores(const Model& model, const Dataset& data) {
  const auto traces = forward_batch(model.params, data.examples, model.variant);
  Matrix scores(data.size(), model.params.num_classes());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    for (std::size_t k = 0; k < scores.cols(); ++k) scores(i, k) = traces[i].probs[k];
  }
  return scores;
}

Matrix target_matrix(const Dataset& data) {
  Matrix t(data.size(), data.num_classes());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& labels = data.examples[i].target.labels;
    for (std::size_t k = 0; k < t.cols(); ++k) t(i, k) = labels.at(k) ? 1.0 : 0.0;
  }
  return t;
}

std::vector<std::size_t> argmax_rows(const Matrix& scores) {
  std::vector<std::size_t> out(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto row = scores.row(i);
    out[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

MetricsReport evaluate_scores(const Matrix& scores, const Dataset& data, const std::vector<std::size_t>& p_at_n) {
  if (data.examples.empty()) throw ArgumentError("cannot evaluate an empty dataset");
  MetricsReport r;
  r.mode = data.mode;
  r.examples = data.size();
  r.label_names = data.label_names;
  const Matrix targets = target_matrix(data);
  const std::size_t K = data.num_classes();
  if (data.mode == Mode::single) {
    const auto preds = argmax_rows(scores);
    std::vector<std::size_t> truth;
    for (const auto& ex : data.examples) truth.push_back(ex.target.label);
    r.accuracy = accuracy(preds, truth);
    r.per_class.assign(K, 0.0);
    std::vector<std::size_t> support(K, 0), hit(K, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      ++support[truth[i]];
      hit[truth[i]] += preds[i] == truth[i] ? 1 : 0;
    }
    for (std::size_t k = 0; k < K; ++k) {
      r.per_class[k] = support[k] ? static_cast<double>(hit[k]) / static_cast<double>(support[k]) : 0.0;
    }
  } else {
    r.micro_f1 = f1(scores, targets, Averaging::micro);
    r.macro_f1 = f1(scores, targets, Averaging::macro);
    r.micro_auc = auc(scores, targets, Averaging::micro);
    r.macro_auc = auc(scores, targets, Averaging::macro);
    for (auto n : p_at_n) {
      if (n >= 1 && n <= K) r.p_at_n[n] = mean_precision_at_n(scores, targets, n);
    }
    r.per_class = f1_per_label(scores, targets);
  }
  return r;
}

MetricsReport evaluate(const Model& model, const Dataset& data, const std::vector<std::size_t>& p_at_n) {
  if (data.mode != model.params.mode) {
    throw DataError("dataset is " + std::string(to_string(data.mode)) + "-label but the model is " +
                    std::string(to_string(model.params.mode)) + "-label");
  }
  if (data.num_classes() != model.params.num_classes()) {
    throw DataError("dataset has " + std::to_string(data.num_classes()) + " classes, model has " +
                    std::to_string(model.params.num_classes()));
  }
  return evaluate_scores(predict_scores(model, data), data, p_at_n);
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  auto put = [&](const std::string& key, const std::optional<double>& v) {
    if (v) j[key] = *v;
    else j[key] = "undefined";
  };
  j["mode"] = std::string(leam::to_string(mode));
  j["examples"] = examples;
  if (mode == Mode::single) {
    put("accuracy", accuracy);
  } else {
    put("micro_f1", micro_f1);
    put("macro_f1", macro_f1);
    put("micro_auc", micro_auc);
    put("macro_auc", macro_auc);
    for (const auto& [n, v] : p_at_n) j["p_at_" + std::to_string(n)] = v;
  }
  const std::string prefix = mode == Mode::single ? "recall/" : "f1/";
  for (std::size_t k = 0; k < per_class.size() && k < label_names.size(); ++k) {
    j[prefix + label_names[k]] = per_class[k];
  }
  return j;
}

}  // namespace leam
