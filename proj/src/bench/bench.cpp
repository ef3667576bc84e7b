#include "leam/bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "leam/train.hpp"

namespace leam {

ModelParams synthetic_params(std::size_t K, std::size_t P, std::size_t r, std::size_t vocab_size,
                             std::uint64_t seed) {
  Prng prng(seed);
  Vocabulary vocab;
  for (std::size_t i = vocab.size(); i < vocab_size; ++i) vocab.add("w" + std::to_string(i));
  EmbeddingTable words{vocab, Matrix(P, vocab.size())};
  for (std::size_t c = 1; c < vocab.size(); ++c) {
    for (std::size_t p = 0; p < P; ++p) words.vectors(p, c) = prng.normal();
  }
  Matrix labels(P, K);
  for (double& x : labels.data()) x = prng.normal();
  ModelParams params = init_params(words, labels, r, Mode::single, prng);
  for (double& w : params.W1.value.data()) w = prng.uniform(-1.0, 1.0);
  for (double& b : params.b1.value.data()) b = prng.uniform(-0.1, 0.1);
  return params;
}

TimingRow time_forward(std::size_t K, std::size_t L, std::size_t P, std::size_t r, std::size_t iterations,
                       std::size_t repeats, bool backward, std::uint64_t seed) {
  const std::size_t vocab_size = std::max<std::size_t>(L, 16) + 2;
  ModelParams params = synthetic_params(K, P, r, vocab_size, seed);
  Prng prng(seed + 1);
  std::vector<std::size_t> tokens(L);
  for (auto& t : tokens) t = 2 + prng.below(vocab_size - 2);
  const Target target{0, {}};

  using Clock = std::chrono::steady_clock;
  double best = std::numeric_limits<double>::infinity();
  double sink = 0.0;
  for (std::size_t rep = 0; rep < std::max<std::size_t>(repeats, 1); ++rep) {
    const auto start = Clock::now();
    for (std::size_t i = 0; i < iterations; ++i) {
      const ForwardTrace trace = forward(params, tokens);
      sink += trace.probs[0];
      if (backward) {
        const Gradients g = backward_gradients(trace, target, params);
        sink += g.b2(0, 0);
      }
    }
    best = std::min(best, std::chrono::duration<double>(Clock::now() - start).count());
  }
  [[maybe_unused]] volatile double observed = sink;
  TimingRow row{K, L, P, r, iterations, 0.0};
  row.seconds_per_1000 = iterations ? best * 1000.0 / static_cast<double>(iterations) : 0.0;
  return row;
}

BenchReport run_bench(const BenchConfig& config) {
  BenchReport report;
  report.counts = count_params(config.K, config.P, config.r, 0);
  auto lengths = config.length_sweep;
  if (lengths.empty()) lengths = {config.L, 2 * config.L};
  auto radii = config.radius_sweep;
  if (radii.empty()) radii = {1, 5, 15, 50};
  for (auto L : lengths) {
    report.length_sweep.push_back(
        time_forward(config.K, L, config.P, config.r, config.iterations, config.repeats, config.backward, config.seed));
  }
  for (auto r : radii) {
    report.radius_sweep.push_back(
        time_forward(config.K, config.L, config.P, r, config.iterations, config.repeats, config.backward, config.seed));
  }
  return report;
}

nlohmann::json BenchReport::to_json() const {
  nlohmann::json j;
  j["params"] = {{"label_embeddings", counts.label_embeddings},
                 {"window_weights", counts.window_weights},
                 {"window_bias", counts.window_bias},
                 {"compositional", counts.compositional()},
                 {"leading_term_KP", counts.leading_term()},
                 {"classifier", counts.classifier()}};
  auto rows = [](const std::vector<TimingRow>& in) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : in) {
      a.push_back({{"K", r.K}, {"L", r.L}, {"P", r.P}, {"r", r.r}, {"iterations", r.iterations},
                   {"seconds_per_1000", r.seconds_per_1000}});
    }
    return a;
  };
  j["length_sweep"] = rows(length_sweep);
  j["radius_sweep"] = rows(radius_sweep);
  return j;
}

}  // namespace leam
