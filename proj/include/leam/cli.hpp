#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "leam/bench.hpp"
#include "leam/checkpoint.hpp"
#include "leam/eval.hpp"
#include "leam/explain.hpp"
#include "leam/train.hpp"

namespace leam::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  TrainConfig train;
  std::filesystem::path train_path;
  std::optional<std::filesystem::path> valid_path;
  std::optional<std::filesystem::path> embeddings_path;
  std::optional<std::filesystem::path> label_desc_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::string> format;  // csv | jsonl; inferred from the extension when absent
  Mode mode = Mode::single;
  std::size_t dim = 300;
  std::size_t max_len = kDefaultMaxLen;
  std::size_t min_freq = 1;
  std::size_t max_vocab = 0;  // 0: unlimited
  std::vector<std::size_t> p_at_n = {1, 3, 5};

  /// Checks referenced paths and numeric ranges; throws ConfigError.
  void validate() const;
};

struct TrainResult {
  Model model;
  LossReport loss;
  MetricsReport train_metrics;
  std::optional<MetricsReport> valid_metrics;
  std::filesystem::path checkpoint_path;
};

/// Trains, then writes <out_dir>/model.leam, loss.json and metrics.json.
TrainResult cmd_train(const RunConfig& config, std::ostream& log);

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  std::optional<std::string> format;
  std::optional<Mode> mode;  // must match the checkpoint when given
  std::size_t max_len = kDefaultMaxLen;
  std::vector<std::size_t> p_at_n = {1, 3, 5};
};

MetricsReport cmd_eval(const EvalOptions& options);

struct PredictOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path input;
  std::optional<std::string> format;  // text | csv | jsonl
  std::size_t max_len = kDefaultMaxLen;
};

struct PredictSummary {
  std::size_t predicted = 0;
  std::size_t skipped = 0;
  std::size_t errors = 0;
};

/// Writes one JSON object per input record to `out`.
PredictSummary cmd_predict(const PredictOptions& options, std::ostream& out);

struct ExplainOptions {
  std::filesystem::path checkpoint;
  std::string text;
  RenderFormat format = RenderFormat::json;
  std::size_t top_k = kDefaultTopK;
  std::size_t max_len = kDefaultMaxLen;
};

std::string cmd_explain(const ExplainOptions& options);

BenchReport cmd_bench(const BenchConfig& config, std::ostream& out);

/// Reads flat `key = value` lines (# comments) into `--key=value` arguments.
std::vector<std::string> config_file_args(const std::filesystem::path& path);

/// Full command-line entry point. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace leam::cli
