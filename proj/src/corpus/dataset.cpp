#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"

#include "leam/corpus.hpp"
#include "leam/error.hpp"

namespace leam {
namespace {

struct RawRow {
  std::vector<std::string> label_names;
  std::string text;
  std::size_t row;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// RFC 4180 records; quoted fields may span lines.
std::vector<std::vector<std::string>> parse_csv(const std::string& content,
                                                const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  auto end_record = [&] {
    if (any || !field.empty() || !fields.empty()) {
      fields.push_back(std::move(field));
      records.push_back(std::move(fields));
    }
    fields.clear();
    field.clear();
    any = false;
  };
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (quoted) throw ParseError(path.string() + ": unterminated quoted field", line);
  end_record();
  return records;
}

std::vector<std::string> split_labels(const std::string& field, Mode mode) {
  if (mode == Mode::single) return {field};
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= field.size()) {
    const std::size_t bar = field.find('|', start);
    const std::string part = field.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
    if (!part.empty()) out.push_back(part);
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

std::vector<RawRow> read_csv_rows(const std::filesystem::path& path, Mode mode) {
  const auto records = parse_csv(read_file(path), path);
  std::vector<RawRow> rows;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.size() < 2) {
      throw ParseError(path.string() + ": row " + std::to_string(i + 1) +
                           ": expected label,text",
                       i + 1);
    }
    std::string text = rec[1];
    for (std::size_t f = 2; f < rec.size(); ++f) text += "," + rec[f];
    rows.push_back({split_labels(rec[0], mode), std::move(text), i + 1});
  }
  return rows;
}

std::vector<RawRow> read_jsonl_rows(const std::filesystem::path& path, Mode mode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::vector<RawRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string()) {
      throw ParseError(where + ": record needs a string field \"text\"", line_no);
    }
    RawRow row{{}, obj["text"].get<std::string>(), line_no};
    if (obj.contains("labels") && obj["labels"].is_array()) {
      for (const auto& l : obj["labels"]) {
        if (!l.is_string()) throw ParseError(where + ": labels must be strings", line_no);
        row.label_names.push_back(l.get<std::string>());
      }
    } else if (mode == Mode::single && obj.contains("label") && obj["label"].is_string()) {
      row.label_names.push_back(obj["label"].get<std::string>());
    } else {
      throw ParseError(where + ": record needs a \"labels\" array", line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<std::vector<std::string>> read_csv_records(const std::filesystem::path& path) {
  return parse_csv(read_file(path), path);
}

DataFormat parse_format(std::string_view text) {
  if (text == "csv") return DataFormat::csv;
  if (text == "jsonl") return DataFormat::jsonl;
  throw ConfigError("unknown data format '" + std::string(text) + "' (expected csv or jsonl)");
}

DataFormat format_from_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return DataFormat::csv;
  if (ext == ".jsonl" || ext == ".json") return DataFormat::jsonl;
  throw ConfigError("cannot infer data format of " + path.string() + "; pass --format");
}

TextDataset read_dataset(const std::filesystem::path& path, DataFormat format, Mode mode,
                         const std::optional<std::vector<std::string>>& label_names) {
  const auto rows = format == DataFormat::csv ? read_csv_rows(path, mode) : read_jsonl_rows(path, mode);
  if (rows.empty()) throw DataError("dataset " + path.string() + " is empty");

  TextDataset out;
  out.mode = mode;
  if (label_names) {
    out.label_names = *label_names;
  } else {
    std::set<std::string> seen;
    for (const auto& r : rows) seen.insert(r.label_names.begin(), r.label_names.end());
    out.label_names.assign(seen.begin(), seen.end());
  }
  const std::size_t num_classes = out.label_names.size();

  for (const auto& r : rows) {
    if (mode == Mode::single && r.label_names.size() != 1) {
      throw DataError(path.string() + ": row " + std::to_string(r.row) +
                      ": single-label mode needs exactly one label");
    }
    TextRecord rec{tokenize(r.text), Target{0, std::vector<std::uint8_t>(num_classes, 0)}, r.row};
    for (const auto& name : r.label_names) {
      const auto it = std::find(out.label_names.begin(), out.label_names.end(), name);
      if (it == out.label_names.end()) {
        throw DataError(path.string() + ": row " + std::to_string(r.row) + ": undeclared label '" +
                        name + "'");
      }
      const auto k = static_cast<std::size_t>(it - out.label_names.begin());
      rec.target.labels[k] = 1;
      rec.target.label = k;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

Example encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                      std::size_t max_len) {
  if (max_len < 1) throw ArgumentError("encode: max_len must be at least 1");
  Example ex;
  const std::size_t n = std::min(tokens.size(), max_len);
  ex.tokens.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ex.tokens.push_back(vocab.index_of(tokens[i]));
  return ex;
}

Example encode(std::string_view text, const Vocabulary& vocab, std::size_t max_len) {
  return encode_tokens(tokenize(text), vocab, max_len);
}

Dataset encode_dataset(const TextDataset& data, const Vocabulary& vocab, std::size_t max_len) {
  Dataset out;
  out.label_names = data.label_names;
  out.mode = data.mode;
  for (const auto& rec : data.records) {
    Example ex = encode_tokens(rec.tokens, vocab, max_len);
    if (ex.tokens.empty()) {
      ++out.skipped;
      continue;
    }
    ex.target = rec.target;
    out.examples.push_back(std::move(ex));
  }
  return out;
}

std::vector<std::string> decode(const Example& example, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(example.tokens.size());
  for (auto idx : example.tokens) out.push_back(vocab.token(idx));
  return out;
}

}  // namespace leam
