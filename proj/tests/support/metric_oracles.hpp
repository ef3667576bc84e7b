#pragma once

// Brute-force metric definitions, written independently of src/eval.

#include <cstddef>
#include <optional>
#include <vector>

#include "leam/matrix.hpp"

namespace oracle {

inline double f1_from_counts(double tp, double fp, double fn) {
  return tp + fp + fn == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

inline double f1(const leam::Matrix& s, const leam::Matrix& y, bool micro, double threshold = 0.5) {
  const std::size_t N = s.rows(), K = s.cols();
  double TP = 0, FP = 0, FN = 0, macro = 0;
  for (std::size_t k = 0; k < K; ++k) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t n = 0; n < N; ++n) {
      const bool pred = s(n, k) >= threshold, truth = y(n, k) == 1;
      tp += pred && truth;
      fp += pred && !truth;
      fn += !pred && truth;
    }
    TP += tp;
    FP += fp;
    FN += fn;
    macro += f1_from_counts(tp, fp, fn);
  }
  return micro ? f1_from_counts(TP, FP, FN) : macro / static_cast<double>(K);
}

// Fraction of (positive, negative) pairs ordered correctly, ties counting half.
inline std::optional<double> pairwise_auc(const std::vector<double>& s, const std::vector<double>& y) {
  double good = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1;
      good += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  if (pairs == 0) return std::nullopt;
  return good / pairs;
}

inline std::optional<double> auc(const leam::Matrix& s, const leam::Matrix& y, bool micro) {
  if (micro) {
    return pairwise_auc({s.data().begin(), s.data().end()}, {y.data().begin(), y.data().end()});
  }
  double total = 0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < s.cols(); ++k) {
    const auto a = pairwise_auc(s.col(k), y.col(k));
    if (!a) continue;
    total += *a;
    ++used;
  }
  if (used == 0) return std::nullopt;
  return total / static_cast<double>(used);
}

// Label k is in the top n when fewer than n labels outrank it (higher score,
// or equal score and lower index).
inline double precision_at_n(const std::vector<double>& s, const std::vector<double>& y, std::size_t n) {
  double hits = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    std::size_t above = 0;
    for (std::size_t j = 0; j < s.size(); ++j) above += s[j] > s[k] || (s[j] == s[k] && j < k);
    if (above < n && y[k] == 1) hits += 1;
  }
  return hits / static_cast<double>(n);
}

}  // namespace oracle
