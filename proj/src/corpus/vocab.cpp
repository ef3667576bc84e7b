#include <algorithm>
#include <map>

#include "leam/corpus.hpp"
#include "leam/error.hpp"

namespace leam {

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[kPad] != kPadToken || tokens[kUnk] != kUnkToken) {
    throw DataError("vocabulary must start with " + std::string(kPadToken) + " and " +
                    std::string(kUnkToken));
  }
  Vocabulary v;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (v.contains(tokens[i])) throw DataError("duplicate vocabulary token '" + tokens[i] + "'");
    v.add(tokens[i]);
  }
  return v;
}

std::size_t Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

std::size_t Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t min_freq,
                       std::size_t max_size) {
  if (min_freq < 1) throw ArgumentError("build_vocab: min_freq must be at least 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus) {
    for (const auto& tok : doc) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [tok, n] : counts) {
    if (n >= min_freq && tok != Vocabulary::kPadToken && tok != Vocabulary::kUnkToken) {
      ranked.emplace_back(tok, n);
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > max_size) ranked.resize(max_size);
  Vocabulary vocab;
  for (const auto& [tok, n] : ranked) vocab.add(tok);
  return vocab;
}

}  // namespace leam
