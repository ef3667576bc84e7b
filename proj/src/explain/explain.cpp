#include "leam/explain.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "leam/error.hpp"

namespace leam {

Highlight explain(const Model& model, std::string_view text, std::size_t top_k, std::size_t max_len) {
  const auto surface = tokenize(text);
  if (surface.empty()) throw ArgumentError("nothing to explain: text has no tokens");
  const Example ex = encode_tokens(surface, model.vocab, max_len);
  const ForwardTrace trace = run_forward(model.params, ex.tokens, model.variant);

  Highlight h;
  h.tokens.assign(surface.begin(), surface.begin() + static_cast<std::ptrdiff_t>(ex.tokens.size()));
  h.weights = trace.beta;

  const std::size_t K = trace.probs.size();
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return trace.probs[a] > trace.probs[b]; });
  for (std::size_t k : order) {
    const bool chosen = model.params.mode == Mode::single ? k == order.front() : trace.probs[k] >= 0.5;
    if (chosen) h.predictions.push_back({model.label_names[k], trace.probs[k]});
  }
  if (h.predictions.empty()) h.predictions.push_back({model.label_names[order.front()], trace.probs[order.front()]});

  std::vector<std::size_t> rank(h.tokens.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return h.weights[a] > h.weights[b]; });
  for (std::size_t i = 0; i < std::min(top_k, rank.size()); ++i) {
    h.top_k.push_back({h.tokens[rank[i]], h.weights[rank[i]]});
  }
  return h;
}

RenderFormat parse_render_format(std::string_view text) {
  if (text == "json") return RenderFormat::json;
  if (text == "ansi") return RenderFormat::ansi;
  if (text == "html") return RenderFormat::html;
  throw ConfigError("unknown render format '" + std::string(text) + "' (expected json, ansi or html)");
}

nlohmann::json to_json(const Highlight& h) {
  nlohmann::json j;
  j["tokens"] = h.tokens;
  j["weights"] = h.weights;
  j["predictions"] = nlohmann::json::array();
  for (const auto& p : h.predictions) j["predictions"].push_back({{"label", p.label}, {"prob", p.prob}});
  j["top_k"] = nlohmann::json::array();
  for (const auto& t : h.top_k) j["top_k"].push_back({{"token", t.token}, {"weight", t.weight}});
  return j;
}

Highlight highlight_from_json(const nlohmann::json& j) {
  try {
    Highlight h;
    h.tokens = j.at("tokens").get<std::vector<std::string>>();
    h.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& p : j.at("predictions")) h.predictions.push_back({p.at("label"), p.at("prob")});
    for (const auto& t : j.at("top_k")) h.top_k.push_back({t.at("token"), t.at("weight")});
    if (h.tokens.size() != h.weights.size()) throw DataError("highlight tokens and weights differ in length");
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed highlight JSON: ") + e.what());
  }
}

std::vector<std::size_t> intensity_buckets(const std::vector<double>& weights) {
  std::vector<double> sorted = weights;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = weights.size();
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto below = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), weights[i]) - sorted.begin());
    out[i] = std::min(kIntensityBuckets - 1, kIntensityBuckets * below / n);
  }
  return out;
}

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

// 256-colour backgrounds from pale to saturated.
constexpr int kAnsiShades[kIntensityBuckets] = {230, 229, 221, 214, 208};

std::string render_ansi(const Highlight& h) {
  const auto buckets = intensity_buckets(h.weights);
  std::ostringstream out;
  for (std::size_t i = 0; i < h.tokens.size(); ++i) {
    if (i) out << ' ';
    out << "\x1b[48;5;" << kAnsiShades[buckets[i]] << ";30m" << h.tokens[i] << "\x1b[0m";
  }
  out << '\n';
  for (const auto& p : h.predictions) out << p.label << ' ' << p.prob << '\n';
  return out.str();
}

std::string render_html(const Highlight& h) {
  const double top = h.weights.empty() ? 1.0 : *std::max_element(h.weights.begin(), h.weights.end());
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"/><title>attention</title></head>\n<body>\n<p>";
  for (std::size_t i = 0; i < h.tokens.size(); ++i) {
    const double opacity = top > 0.0 ? h.weights[i] / top : 0.0;
    out << "<span title=\"" << h.weights[i] << "\" style=\"background-color: rgba(255, 140, 0, " << opacity
        << ")\">" << html_escape(h.tokens[i]) << "</span> ";
  }
  out << "</p>\n<ul>";
  for (const auto& p : h.predictions) out << "<li>" << html_escape(p.label) << ": " << p.prob << "</li>";
  out << "</ul>\n</body>\n</html>\n";
  return out.str();
}

}  // namespace

std::string render(const Highlight& h, RenderFormat format) {
  switch (format) {
    case RenderFormat::json: return to_json(h).dump(2) + "\n";
    case RenderFormat::ansi: return render_ansi(h);
    case RenderFormat::html: return render_html(h);
  }
  throw ArgumentError("unknown render format");
}

}  // namespace leam
