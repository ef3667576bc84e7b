#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "leam/matrix.hpp"
#include "leam/prng.hpp"

namespace leam {

enum class Mode : std::uint8_t { single = 0, multi = 1 };

std::string_view to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view text);

// ---------------------------------------------------------------------------
// Tokenization and vocabulary

/// Lowercases ASCII letters, splits on whitespace, and emits every ASCII
/// punctuation character as its own token. Non-ASCII bytes pass through.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  /// PAD and UNK only.
  Vocabulary();

  /// Rebuilds from a full index→token list whose first two entries are PAD and UNK.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t index_of(std::string_view token) const;  // kUnk when absent
  bool contains(std::string_view token) const;
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  /// Appends a token if new; returns its index.
  std::size_t add(const std::string& token);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Tokens with frequency >= min_freq ranked by (frequency desc, token asc),
/// truncated to max_size entries, after PAD and UNK.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t min_freq = 1,
                       std::size_t max_size = std::numeric_limits<std::size_t>::max());

// ---------------------------------------------------------------------------
// Embeddings

/// Word vectors, one column per vocabulary entry (P x |vocab|).
struct EmbeddingTable {
  Vocabulary vocab;
  Matrix vectors;

  std::size_t dim() const noexcept { return vectors.rows(); }
  Vector vector_of(std::string_view token) const;
};

inline constexpr double kOovRange = 0.01;

/// Every column uniform in [-0.01, 0.01] except PAD, which is zero.
EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim, Prng& prng);

/// Reads a whitespace-delimited embedding text file (token followed by dim
/// decimals per line). Vocabulary tokens found in the file take the file
/// vector; the rest are drawn uniform in [-0.01, 0.01]; PAD stays zero.
/// Tokens not in the vocabulary are skipped.
EmbeddingTable load_pretrained(const std::filesystem::path& path, const Vocabulary& vocab,
                               std::size_t dim, Prng& prng);

/// Per-class description words; exactly one entry per class.
struct LabelDescriptions {
  std::vector<std::vector<std::string>> words;
};

inline constexpr double kLabelGaussianScale = 0.1;

/// P x K label embeddings: mean of each class's known description-word
/// vectors, or a 0.1-scaled standard Gaussian column when none are known.
Matrix init_label_embeddings(const LabelDescriptions& desc, const EmbeddingTable& emb, Prng& prng,
                             double gaussian_scale = kLabelGaussianScale);

/// Reads "label word word ..." lines; classes not mentioned get an empty description.
LabelDescriptions read_label_descriptions(const std::filesystem::path& path,
                                          const std::vector<std::string>& label_names);

// ---------------------------------------------------------------------------
// Datasets

/// Class targets. In single mode `label` is the class and `labels` its
/// one-hot indicator; in multi mode `labels` is the K-length indicator.
struct Target {
  std::size_t label = 0;
  std::vector<std::uint8_t> labels;
};

struct Example {
  std::vector<std::size_t> tokens;
  Target target;
};

/// Tokenized but not yet indexed records, as read from disk.
struct TextRecord {
  std::vector<std::string> tokens;
  Target target;
  std::size_t row = 0;  // 1-based record number in the source file
};

struct TextDataset {
  std::vector<TextRecord> records;
  std::vector<std::string> label_names;
  Mode mode = Mode::single;

  std::size_t num_classes() const noexcept { return label_names.size(); }
};

struct Dataset {
  std::vector<Example> examples;
  std::vector<std::string> label_names;
  Mode mode = Mode::single;
  std::size_t skipped = 0;  // records empty after tokenization

  std::size_t num_classes() const noexcept { return label_names.size(); }
  std::size_t size() const noexcept { return examples.size(); }
};

enum class DataFormat : std::uint8_t { csv, jsonl };

DataFormat parse_format(std::string_view text);
/// csv for ".csv", jsonl for ".jsonl"/".json"; throws ConfigError otherwise.
DataFormat format_from_extension(const std::filesystem::path& path);

/// Reads `label,text` CSV rows (multi mode: labels joined by '|') or JSONL
/// objects with a `text` string and a `labels` array (single mode also
/// accepts a `label` string). With a label list, names outside it are a
/// DataError naming the row; without one, the label set is inferred and
/// sorted.
TextDataset read_dataset(const std::filesystem::path& path, DataFormat format, Mode mode,
                         const std::optional<std::vector<std::string>>& label_names = std::nullopt);

/// Raw CSV records (RFC 4180 quoting, quoted fields may span lines).
std::vector<std::vector<std::string>> read_csv_records(const std::filesystem::path& path);

/// Maps tokens to indices (UNK for unknown) and truncates to max_len.
Example encode(std::string_view text, const Vocabulary& vocab, std::size_t max_len);
Example encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                      std::size_t max_len);

/// Encodes every record; records with no tokens are dropped and counted.
Dataset encode_dataset(const TextDataset& data, const Vocabulary& vocab, std::size_t max_len);

std::vector<std::string> decode(const Example& example, const Vocabulary& vocab);

}  // namespace leam
