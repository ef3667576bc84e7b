#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "leam/cli.hpp"
#include "leam/error.hpp"

namespace leam::cli {
namespace {

std::vector<std::size_t> parse_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": '" + item + "' is not a non-negative integer");
    }
  }
  return out;
}

// Expands `--config FILE` / `--config=FILE` into the file's `--key=value`
// pairs placed ahead of the remaining arguments, so explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    std::size_t consumed = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      consumed = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      consumed = 1;
    }
    if (consumed == 0) continue;
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + consumed));
    const auto extra = config_file_args(path);
    const std::size_t at = args.empty() ? 0 : 1;  // after the subcommand name
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
    break;
  }
  return args;
}

void write_output(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream file(*path);
  if (!file) throw IoError("cannot write " + *path);
  file << text;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Label-embedding attentive text classifier", "leam"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;

  // train
  RunConfig rc;
  std::string train_path, variant = "leam", mode = "single", p_at_n = "1,3,5";
  std::string valid_path, embeddings_path, label_desc_path, format;
  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  train->add_option("--config", config_path, "Flat key=value file; flags override it");
  train->add_option("--train", train_path, "Training data (csv or jsonl)")->required();
  train->add_option("--valid", valid_path, "Validation data");
  train->add_option("--format", format, "csv or jsonl (default: from extension)");
  train->add_option("--mode", mode, "single or multi")->capture_default_str();
  train->add_option("--embeddings", embeddings_path, "Pretrained embedding text file");
  train->add_option("--label-desc", label_desc_path, "Label descriptions: 'label word word ...' per line");
  train->add_option("--out-dir", rc.out_dir, "Output directory")->capture_default_str();
  train->add_option("--dim", rc.dim, "Embedding dimension")->capture_default_str();
  train->add_option("--max-len", rc.max_len, "Tokens kept per document")->capture_default_str();
  train->add_option("--min-freq", rc.min_freq, "Minimum token frequency")->capture_default_str();
  train->add_option("--max-vocab", rc.max_vocab, "Vocabulary cap, 0 for none")->capture_default_str();
  train->add_option("--lr", rc.train.lr)->capture_default_str();
  train->add_option("--batch-size", rc.train.batch_size)->capture_default_str();
  train->add_option("--epochs", rc.train.epochs)->capture_default_str();
  train->add_option("--dropout-rate", rc.train.dropout_rate)->capture_default_str();
  train->add_option("--reg-weight", rc.train.reg_weight, "Label regularizer weight")->capture_default_str();
  train->add_option("--window-radius", rc.train.window_radius, "Phrase window radius r")->capture_default_str();
  train->add_option("--seed", rc.train.seed)->capture_default_str();
  train->add_option("--labeled-fraction", rc.train.labeled_fraction)->capture_default_str();
  train->add_option("--variant", variant, "leam, leam_linear, swem_mean or swem_max")->capture_default_str();
  train->add_flag("--freeze-embeddings", rc.train.freeze_embeddings, "Keep word embeddings fixed");
  train->add_option("--workers", rc.train.workers, "Threads per minibatch")->capture_default_str();
  train->add_option("--p-at-n", p_at_n, "Comma-separated n for P@n")->capture_default_str();

  // eval
  EvalOptions eo;
  std::string eval_mode, eval_p_at_n = "1,3,5", eval_out, eval_format;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a labeled dataset");
  eval->add_option("--config", config_path);
  eval->add_option("--checkpoint", eo.checkpoint)->required();
  eval->add_option("--data", eo.data)->required();
  eval->add_option("--format", eval_format, "csv or jsonl (default: from extension)");
  eval->add_option("--mode", eval_mode, "Expected mode; must match the checkpoint");
  eval->add_option("--max-len", eo.max_len)->capture_default_str();
  eval->add_option("--p-at-n", eval_p_at_n)->capture_default_str();
  eval->add_option("--out", eval_out, "Metrics JSON path (default: stdout)");

  // predict
  PredictOptions po;
  std::string predict_format, predict_out;
  auto* predict = app.add_subcommand("predict", "Label every record of an input file");
  predict->add_option("--config", config_path);
  predict->add_option("--checkpoint", po.checkpoint)->required();
  predict->add_option("--input", po.input)->required();
  predict->add_option("--format", predict_format, "text, csv or jsonl (default: from extension)");
  predict->add_option("--max-len", po.max_len)->capture_default_str();
  predict->add_option("--out", predict_out, "Predictions JSONL path (default: stdout)");

  // explain
  ExplainOptions xo;
  std::string explain_text, explain_input, explain_render = "json", explain_out;
  auto* explain_cmd = app.add_subcommand("explain", "Show the attention over one text");
  explain_cmd->add_option("--config", config_path);
  explain_cmd->add_option("--checkpoint", xo.checkpoint)->required();
  auto* text_opt = explain_cmd->add_option("--text", explain_text, "Text to explain");
  auto* input_opt = explain_cmd->add_option("--input", explain_input, "File whose contents are explained");
  text_opt->excludes(input_opt);
  explain_cmd->add_option("--render", explain_render, "json, ansi or html")->capture_default_str();
  explain_cmd->add_option("--top-k", xo.top_k)->capture_default_str();
  explain_cmd->add_option("--max-len", xo.max_len)->capture_default_str();
  explain_cmd->add_option("--out", explain_out, "Output path (default: stdout)");

  // bench
  BenchConfig bc;
  std::string length_sweep, radius_sweep = "1,5,15,50", bench_out;
  auto* bench = app.add_subcommand("bench", "Parameter accounting and forward timing");
  bench->add_option("--config", config_path);
  bench->add_option("--classes", bc.K, "K")->capture_default_str();
  bench->add_option("--dim", bc.P, "P")->capture_default_str();
  bench->add_option("--length", bc.L, "L")->capture_default_str();
  bench->add_option("--window-radius", bc.r, "r")->capture_default_str();
  bench->add_option("--iterations", bc.iterations)->capture_default_str();
  bench->add_option("--repeats", bc.repeats, "Best of this many timed runs")->capture_default_str();
  bench->add_flag("--backward", bc.backward, "Time forward+backward");
  bench->add_option("--seed", bc.seed)->capture_default_str();
  bench->add_option("--length-sweep", length_sweep, "Comma-separated L values (default: L,2L)");
  bench->add_option("--radius-sweep", radius_sweep, "Comma-separated r values")->capture_default_str();
  bench->add_option("--out", bench_out, "Report JSON path");

  for (auto* sub : {train, eval, predict, explain_cmd, bench}) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*train) {
      rc.train_path = train_path;
      if (!valid_path.empty()) rc.valid_path = valid_path;
      if (!embeddings_path.empty()) rc.embeddings_path = embeddings_path;
      if (!label_desc_path.empty()) rc.label_desc_path = label_desc_path;
      if (!format.empty()) rc.format = format;
      rc.mode = parse_mode(mode);
      rc.train.variant = parse_variant(variant);
      rc.p_at_n = parse_list(p_at_n, "--p-at-n");
      cmd_train(rc, out);
    } else if (*eval) {
      if (!eval_format.empty()) eo.format = eval_format;
      if (!eval_mode.empty()) eo.mode = parse_mode(eval_mode);
      eo.p_at_n = parse_list(eval_p_at_n, "--p-at-n");
      const MetricsReport report = cmd_eval(eo);
      write_output(eval_out.empty() ? std::nullopt : std::optional(eval_out), report.to_json().dump(2) + "\n", out);
    } else if (*predict) {
      if (!predict_format.empty()) po.format = predict_format;
      PredictSummary summary;
      if (predict_out.empty()) {
        summary = cmd_predict(po, out);
      } else {
        std::ofstream file(predict_out);
        if (!file) throw IoError("cannot write " + predict_out);
        summary = cmd_predict(po, file);
      }
      err << "predicted " << summary.predicted << ", skipped " << summary.skipped << ", errors " << summary.errors
          << '\n';
    } else if (*explain_cmd) {
      if (!explain_input.empty()) {
        std::ifstream in(explain_input);
        if (!in) throw ConfigError("input file not found: " + explain_input);
        std::stringstream buf;
        buf << in.rdbuf();
        xo.text = buf.str();
      } else if (explain_text.empty()) {
        throw ConfigError("explain needs --text or --input");
      } else {
        xo.text = explain_text;
      }
      xo.format = parse_render_format(explain_render);
      write_output(explain_out.empty() ? std::nullopt : std::optional(explain_out), cmd_explain(xo), out);
    } else if (*bench) {
      bc.length_sweep = parse_list(length_sweep, "--length-sweep");
      bc.radius_sweep = parse_list(radius_sweep, "--radius-sweep");
      const BenchReport report = cmd_bench(bc, out);
      if (!bench_out.empty()) write_output(bench_out, report.to_json().dump(2) + "\n", out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace leam::cli
