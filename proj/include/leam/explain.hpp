#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "leam/checkpoint.hpp"

namespace leam {

struct LabelProb {
  std::string label;
  double prob = 0.0;
  friend bool operator==(const LabelProb&, const LabelProb&) = default;
};

struct TokenWeight {
  std::string token;
  double weight = 0.0;
  friend bool operator==(const TokenWeight&, const TokenWeight&) = default;
};

/// Attention over one document, paired with its surface tokens.
struct Highlight {
  std::vector<std::string> tokens;
  std::vector<double> weights;
  std::vector<LabelProb> predictions;
  std::vector<TokenWeight> top_k;

  friend bool operator==(const Highlight&, const Highlight&) = default;
};

inline constexpr std::size_t kDefaultTopK = 5;
inline constexpr std::size_t kDefaultMaxLen = 500;

/// Runs inference on `text` and returns its attention. Predictions are the
/// argmax label (single) or every label at probability >= 0.5 (multi, or the
/// best label when none reaches it). Throws ArgumentError when the text has
/// no tokens.
Highlight explain(const Model& model, std::string_view text, std::size_t top_k = kDefaultTopK,
                  std::size_t max_len = kDefaultMaxLen);

enum class RenderFormat : std::uint8_t { json, ansi, html };

RenderFormat parse_render_format(std::string_view text);

std::string render(const Highlight& h, RenderFormat format);

nlohmann::json to_json(const Highlight& h);
Highlight highlight_from_json(const nlohmann::json& j);

inline constexpr std::size_t kIntensityBuckets = 5;

/// Within-document quantile bucket of each weight: floor(5 * #{weights < w} / n).
std::vector<std::size_t> intensity_buckets(const std::vector<double>& weights);

std::string html_escape(std::string_view text);

}  // namespace leam
