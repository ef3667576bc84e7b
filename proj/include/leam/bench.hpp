#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "leam/model.hpp"

namespace leam {

struct BenchConfig {
  std::size_t K = 10;
  std::size_t P = 300;
  std::size_t L = 200;
  std::size_t r = 50;
  std::size_t iterations = 1000;
  std::size_t repeats = 3;  // best of
  bool backward = false;
  std::uint64_t seed = 1;
  std::vector<std::size_t> length_sweep;  // defaults to {L, 2L}
  std::vector<std::size_t> radius_sweep;  // defaults to {1, 5, 15, 50}
};

struct TimingRow {
  std::size_t K = 0, L = 0, P = 0, r = 0;
  std::size_t iterations = 0;
  double seconds_per_1000 = 0.0;
};

struct BenchReport {
  ParamCount counts;
  std::vector<TimingRow> length_sweep;
  std::vector<TimingRow> radius_sweep;

  nlohmann::json to_json() const;
};

/// Random model and token sequence of the given shape.
ModelParams synthetic_params(std::size_t K, std::size_t P, std::size_t r, std::size_t vocab_size,
                             std::uint64_t seed);

/// Best-of-`repeats` wall clock for `iterations` forward (+backward) passes,
/// scaled to seconds per 1000 iterations.
TimingRow time_forward(std::size_t K, std::size_t L, std::size_t P, std::size_t r, std::size_t iterations,
                       std::size_t repeats, bool backward, std::uint64_t seed);

BenchReport run_bench(const BenchConfig& config);

}  // namespace leam
