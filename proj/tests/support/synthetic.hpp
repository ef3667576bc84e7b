#pragma once

// Keyword corpora with known class signal, for training-level tests.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "leam/checkpoint.hpp"
#include "leam/corpus.hpp"
#include "leam/train.hpp"

namespace synth {

struct KeywordSpec {
  std::size_t classes = 4;
  std::size_t signals_per_class = 3;  // words owned by each class
  std::size_t signals_per_doc = 3;    // signal occurrences inserted per document
  std::size_t noise_per_doc = 20;
  std::size_t noise_vocab = 200;
  std::size_t train = 400;
  std::size_t test = 200;
  std::size_t dim = 300;
  double embedding_scale = 0.5;  // std of each pretrained coordinate
  // Signal words of a class are centre + spread * fresh noise; 0 puts them all
  // on the class centre, large values make them unrelated.
  double signal_spread = 0.5;
  std::uint64_t seed = 7;
};

struct Corpus {
  leam::TextDataset train, test;
  std::map<std::string, leam::Vector> vectors;  // stand-in for a pretrained file
  leam::LabelDescriptions descriptions;
  std::vector<std::vector<std::string>> class_signals;
  std::size_t dim = 0;
};

/// Single-label: each document is noise plus signals_per_doc words of its class.
Corpus keyword_corpus(const KeywordSpec& spec);

/// Multi-label: each document carries `active` distinct labels, signals_per_doc signal words each.
Corpus multilabel_corpus(const KeywordSpec& spec, std::size_t active);

/// Two classes over the same two marker words: adjacent ("a b") in class 0,
/// separated by at least `gap` noise tokens in class 1.
Corpus bigram_corpus(const KeywordSpec& spec, std::size_t gap);

/// Vocabulary from the training split, pretrained vectors for known words,
/// label embeddings from the descriptions (or Gaussian when `use_descriptions` is false).
leam::Model build_model(const Corpus& corpus, std::size_t r, leam::Variant variant, std::uint64_t seed,
                        bool use_descriptions = true);

leam::Dataset encode(const leam::TextDataset& text, const leam::Model& model);

/// Writes `label,text` CSV rows.
void write_csv(const leam::TextDataset& data, const std::string& path);
/// Writes "token v1 ... vP" lines.
void write_embeddings(const Corpus& corpus, const std::string& path);
/// Writes "label word ..." lines.
void write_descriptions(const Corpus& corpus, const std::string& path);

double test_accuracy(const leam::Model& model, const leam::Dataset& test);

}  // namespace synth
