#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "leam/corpus.hpp"
#include "leam/error.hpp"

namespace leam {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

}  // namespace

Vector EmbeddingTable::vector_of(std::string_view token) const {
  return vectors.col(vocab.index_of(token));
}

EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim, Prng& prng) {
  EmbeddingTable table{vocab, Matrix(dim, vocab.size())};
  for (std::size_t c = 0; c < vocab.size(); ++c) {
    if (c == Vocabulary::kPad) continue;
    for (std::size_t r = 0; r < dim; ++r) table.vectors(r, c) = prng.uniform(-kOovRange, kOovRange);
  }
  return table;
}

EmbeddingTable load_pretrained(const std::filesystem::path& path, const Vocabulary& vocab,
                               std::size_t dim, Prng& prng) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file " + path.string());

  EmbeddingTable table = random_embeddings(vocab, dim, prng);
  std::vector<bool> seen(vocab.size(), false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != dim + 1) {
      throw ShapeError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(dim) + " values after the token, found " +
                       std::to_string(fields.size() - 1));
    }
    Vector values(dim);
    for (std::size_t r = 0; r < dim; ++r) {
      const auto field = fields[r + 1];
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), values[r]);
      if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(values[r])) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                             std::string(field) + "'",
                         line_no);
      }
    }
    if (!vocab.contains(fields[0])) continue;
    const std::size_t idx = vocab.index_of(fields[0]);
    if (idx == Vocabulary::kPad || seen[idx]) continue;
    seen[idx] = true;
    table.vectors.set_col(idx, values);
  }
  return table;
}

Matrix init_label_embeddings(const LabelDescriptions& desc, const EmbeddingTable& emb, Prng& prng,
                             double gaussian_scale) {
  const std::size_t dim = emb.dim();
  Matrix labels(dim, desc.words.size());
  for (std::size_t k = 0; k < desc.words.size(); ++k) {
    Vector sum(dim, 0.0);
    std::size_t used = 0;
    for (const auto& word : desc.words[k]) {
      const std::size_t idx = emb.vocab.index_of(word);
      if (idx == Vocabulary::kUnk || idx == Vocabulary::kPad) continue;
      for (std::size_t r = 0; r < dim; ++r) sum[r] += emb.vectors(r, idx);
      ++used;
    }
    if (used > 0) {
      for (std::size_t r = 0; r < dim; ++r) labels(r, k) = sum[r] / static_cast<double>(used);
    } else {
      for (std::size_t r = 0; r < dim; ++r) labels(r, k) = gaussian_scale * prng.normal();
    }
  }
  return labels;
}

LabelDescriptions read_label_descriptions(const std::filesystem::path& path,
                                          const std::vector<std::string>& label_names) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label description file " + path.string());
  LabelDescriptions desc{std::vector<std::vector<std::string>>(label_names.size())};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string label;
    if (!(fields >> label)) continue;
    std::size_t k = 0;
    while (k < label_names.size() && label_names[k] != label) ++k;
    if (k == label_names.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": unknown label '" + label +
                      "'");
    }
    std::string rest;
    std::getline(fields, rest);
    desc.words[k] = tokenize(rest);
  }
  return desc;
}

}  // namespace leam
