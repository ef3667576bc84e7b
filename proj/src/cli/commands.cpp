#include <fstream>
#include <iomanip>
#include <limits>
#include <iostream>
#include <sstream>

#include "leam/cli.hpp"
#include "leam/error.hpp"

namespace leam::cli {
namespace {

void require_file(const std::filesystem::path& path, const char* what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError(std::string(what) + " not found: " + path.string());
  }
}

DataFormat resolve_format(const std::optional<std::string>& format, const std::filesystem::path& path) {
  return format ? parse_format(*format) : format_from_extension(path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json loss_json(const LossReport& loss) {
  nlohmann::json j;
  j["examples_used"] = loss.examples_used;
  j["epochs"] = nlohmann::json::array();
  for (std::size_t e = 0; e < loss.epochs.size(); ++e) {
    const auto& l = loss.epochs[e];
    j["epochs"].push_back({{"epoch", e + 1}, {"data_loss", l.data}, {"reg_loss", l.reg}, {"total", l.total}});
  }
  j["warnings"] = loss.warnings;
  return j;
}

void print_metrics(std::ostream& log, const char* split, const MetricsReport& m) {
  log << split << ":";
  if (m.accuracy) log << " accuracy=" << *m.accuracy;
  if (m.micro_f1) log << " micro_f1=" << *m.micro_f1;
  if (m.macro_f1) log << " macro_f1=" << *m.macro_f1;
  if (m.micro_auc) log << " micro_auc=" << *m.micro_auc;
  if (m.macro_auc) log << " macro_auc=" << *m.macro_auc;
  for (const auto& [n, v] : m.p_at_n) log << " p@" << n << "=" << v;
  log << '\n';
}

}  // namespace

void RunConfig::validate() const {
  train.validate();
  require_file(train_path, "training data");
  if (valid_path) require_file(*valid_path, "validation data");
  if (embeddings_path) require_file(*embeddings_path, "embedding file");
  if (label_desc_path) require_file(*label_desc_path, "label description file");
  if (dim < 1) throw ConfigError("dim must be at least 1");
  if (max_len < 1) throw ConfigError("max-len must be at least 1");
  if (min_freq < 1) throw ConfigError("min-freq must be at least 1");
}

TrainResult cmd_train(const RunConfig& config, std::ostream& log) {
  config.validate();
  const DataFormat format = resolve_format(config.format, config.train_path);
  const TextDataset train_text = read_dataset(config.train_path, format, config.mode);
  if (train_text.num_classes() < 2) {
    throw DataError("training data names " + std::to_string(train_text.num_classes()) +
                    " label(s); at least 2 are needed");
  }
  std::optional<TextDataset> valid_text;
  if (config.valid_path) {
    valid_text = read_dataset(*config.valid_path, resolve_format(config.format, *config.valid_path), config.mode,
                              train_text.label_names);
  }
  LabelDescriptions desc{std::vector<std::vector<std::string>>(train_text.num_classes())};
  if (config.label_desc_path) desc = read_label_descriptions(*config.label_desc_path, train_text.label_names);

  std::vector<std::vector<std::string>> corpus;
  for (const auto& rec : train_text.records) corpus.push_back(rec.tokens);
  for (const auto& words : desc.words) corpus.push_back(words);
  const Vocabulary vocab = build_vocab(corpus, config.min_freq,
                                       config.max_vocab ? config.max_vocab : std::numeric_limits<std::size_t>::max());

  Prng prng(config.train.seed);
  const EmbeddingTable words = config.embeddings_path
                                   ? load_pretrained(*config.embeddings_path, vocab, config.dim, prng)
                                   : random_embeddings(vocab, config.dim, prng);
  const Matrix labels = init_label_embeddings(desc, words, prng);

  TrainResult result;
  result.model.vocab = vocab;
  result.model.label_names = train_text.label_names;
  result.model.variant = config.train.variant;
  result.model.params = init_params(words, labels, config.train.window_radius, config.mode, prng);

  const Dataset train = encode_dataset(train_text, vocab, config.max_len);
  log << "training " << to_string(config.train.variant) << " on " << train.size() << " examples, "
      << train.num_classes() << " classes, vocabulary " << vocab.size() << '\n';
  if (train.skipped) log << "skipped " << train.skipped << " empty training records\n";
  result.loss = fit(train, result.model.params, config.train);
  for (const auto& w : result.loss.warnings) log << "warning: " << w << '\n';
  for (std::size_t e = 0; e < result.loss.epochs.size(); ++e) {
    const auto& l = result.loss.epochs[e];
    log << "epoch " << e + 1 << " data=" << l.data << " reg=" << l.reg << " total=" << l.total << '\n';
  }

  result.train_metrics = evaluate(result.model, train, config.p_at_n);
  print_metrics(log, "train", result.train_metrics);
  nlohmann::json metrics;
  metrics["train"] = result.train_metrics.to_json();
  if (valid_text) {
    const Dataset valid = encode_dataset(*valid_text, vocab, config.max_len);
    result.valid_metrics = evaluate(result.model, valid, config.p_at_n);
    print_metrics(log, "valid", *result.valid_metrics);
    metrics["valid"] = result.valid_metrics->to_json();
  }

  std::filesystem::create_directories(config.out_dir);
  result.checkpoint_path = config.out_dir / "model.leam";
  save_checkpoint(result.model, result.checkpoint_path);
  write_json(config.out_dir / "loss.json", loss_json(result.loss));
  write_json(config.out_dir / "metrics.json", metrics);
  log << "wrote " << result.checkpoint_path.string() << '\n';
  return result;
}

MetricsReport cmd_eval(const EvalOptions& options) {
  require_file(options.checkpoint, "checkpoint");
  require_file(options.data, "dataset");
  const Model model = load_checkpoint(options.checkpoint);
  if (options.mode && *options.mode != model.params.mode) {
    throw DataError("requested " + std::string(to_string(*options.mode)) + "-label evaluation but the checkpoint is " +
                    std::string(to_string(model.params.mode)) + "-label");
  }
  const TextDataset text =
      read_dataset(options.data, resolve_format(options.format, options.data), model.params.mode, model.label_names);
  return evaluate(model, encode_dataset(text, model.vocab, options.max_len), options.p_at_n);
}

PredictSummary cmd_predict(const PredictOptions& options, std::ostream& out) {
  require_file(options.checkpoint, "checkpoint");
  require_file(options.input, "input file");
  const Model model = load_checkpoint(options.checkpoint);

  std::string format = options.format.value_or("");
  if (format.empty()) {
    const auto ext = options.input.extension().string();
    format = ext == ".csv" ? "csv" : (ext == ".jsonl" || ext == ".json") ? "jsonl" : "text";
  }

  // Each entry is the record text, or an error message.
  struct Record {
    std::optional<std::string> text;
    std::string error;
  };
  std::vector<Record> records;
  if (format == "csv") {
    for (const auto& fields : read_csv_records(options.input)) {
      if (fields.size() < 2) {
        records.push_back({fields.empty() ? std::optional<std::string>() : fields[0], ""});
        continue;
      }
      std::string text = fields[1];
      for (std::size_t f = 2; f < fields.size(); ++f) text += "," + fields[f];
      records.push_back({text, ""});
    }
  } else if (format == "jsonl" || format == "text") {
    std::ifstream in(options.input);
    if (!in) throw IoError("cannot open " + options.input.string());
    std::string line;
    while (std::getline(in, line)) {
      if (format == "text") {
        records.push_back({line, ""});
        continue;
      }
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
          records.push_back({std::nullopt, "record has no string field \"text\""});
        } else {
          records.push_back({j["text"].get<std::string>(), ""});
        }
      } catch (const nlohmann::json::exception& e) {
        records.push_back({std::nullopt, e.what()});
      }
    }
  } else {
    throw ConfigError("unknown input format '" + format + "' (expected text, csv or jsonl)");
  }

  PredictSummary summary;
  for (std::size_t i = 0; i < records.size(); ++i) {
    nlohmann::json row;
    row["record"] = i + 1;
    if (!records[i].text) {
      row["status"] = "error";
      row["error"] = records[i].error.empty() ? "unreadable record" : records[i].error;
      ++summary.errors;
      out << row.dump() << '\n';
      continue;
    }
    const Example ex = encode(*records[i].text, model.vocab, options.max_len);
    if (ex.tokens.empty()) {
      row["status"] = "skipped";
      ++summary.skipped;
      out << row.dump() << '\n';
      continue;
    }
    const ForwardTrace trace = run_forward(model.params, ex.tokens, model.variant);
    nlohmann::json scores = nlohmann::json::object();
    for (std::size_t k = 0; k < trace.probs.size(); ++k) scores[model.label_names[k]] = trace.probs[k];
    row["scores"] = scores;
    if (model.params.mode == Mode::single) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < trace.probs.size(); ++k) {
        if (trace.probs[k] > trace.probs[best]) best = k;
      }
      row["label"] = model.label_names[best];
      row["prob"] = trace.probs[best];
    } else {
      nlohmann::json labels = nlohmann::json::array();
      for (std::size_t k = 0; k < trace.probs.size(); ++k) {
        if (trace.probs[k] >= kDecisionThreshold) labels.push_back(model.label_names[k]);
      }
      row["labels"] = labels;
    }
    row["status"] = "ok";
    ++summary.predicted;
    out << row.dump() << '\n';
  }
  return summary;
}

std::string cmd_explain(const ExplainOptions& options) {
  require_file(options.checkpoint, "checkpoint");
  const Model model = load_checkpoint(options.checkpoint);
  return render(explain(model, options.text, options.top_k, options.max_len), options.format);
}

BenchReport cmd_bench(const BenchConfig& config, std::ostream& out) {
  const BenchReport report = run_bench(config);
  const auto& c = report.counts;
  out << "compositional parameters: " << c.compositional() << " (K*P=" << c.leading_term()
      << ", W1=" << c.window_weights << ", b1=" << c.window_bias << ")\n"
      << "classifier parameters:    " << c.classifier() << '\n';
  auto table = [&](const char* title, const std::vector<TimingRow>& rows) {
    out << title << '\n' << "       K       L       P       r   s/1000 iters\n";
    for (const auto& r : rows) {
      out << std::setw(8) << r.K << std::setw(8) << r.L << std::setw(8) << r.P << std::setw(8) << r.r
          << std::setw(15) << std::setprecision(6) << r.seconds_per_1000 << '\n';
    }
  };
  table(config.backward ? "length sweep (forward+backward)" : "length sweep (forward)", report.length_sweep);
  table(config.backward ? "radius sweep (forward+backward)" : "radius sweep (forward)", report.radius_sweep);
  return report;
}

std::vector<std::string> config_file_args(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  std::vector<std::string> args;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    args.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return args;
}

}  // namespace leam::cli
