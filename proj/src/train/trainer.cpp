#include <algorithm>
#include <cmath>
#include <numeric>

#include "leam/error.hpp"
#include "leam/train.hpp"

namespace leam {

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (batch_size < 1) throw ConfigError("batch-size must be at least 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout-rate must lie in [0, 1)");
  if (!(labeled_fraction > 0.0 && labeled_fraction <= 1.0)) {
    throw ConfigError("labeled-fraction must lie in (0, 1]");
  }
  if (!(reg_weight >= 0.0)) throw ConfigError("reg-weight must be non-negative");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && eps > 0.0)) {
    throw ConfigError("Adam betas must lie in [0, 1) and eps must be positive");
  }
}

Vector dropout_mask(std::size_t n, double rate, Prng& prng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ArgumentError("dropout rate must lie in [0, 1)");
  const double keep = 1.0 / (1.0 - rate);
  Vector mask(n);
  for (double& m : mask) m = prng.uniform() < rate ? 0.0 : keep;
  return mask;
}

Vector apply_dropout(std::span<const double> x, double rate, Prng& prng, bool training) {
  Vector out(x.begin(), x.end());
  if (!training || rate == 0.0) return out;
  const Vector mask = dropout_mask(x.size(), rate, prng);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return out;
}

Subsample subsample(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ArgumentError("subsample fraction must lie in (0, 1]");
  Subsample out{data, {}};
  if (fraction == 1.0) return out;

  const std::size_t N = data.size(), K = data.num_classes();
  // Stratum: the class (single) or the first active label, K for none (multi).
  std::vector<std::vector<std::size_t>> strata(K + 1);
  for (std::size_t i = 0; i < N; ++i) {
    const Target& t = data.examples[i].target;
    std::size_t s = t.label;
    if (data.mode == Mode::multi) {
      const auto it = std::find(t.labels.begin(), t.labels.end(), std::uint8_t{1});
      s = static_cast<std::size_t>(it - t.labels.begin());
    }
    strata[std::min(s, K)].push_back(i);
  }
  const auto total = static_cast<std::size_t>(std::ceil(static_cast<double>(N) * fraction - 1e-9));

  std::vector<std::size_t> quota(strata.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    const double exact = static_cast<double>(strata[s].size()) * static_cast<double>(total) / static_cast<double>(N);
    quota[s] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    assigned += quota[s];
    remainders.emplace_back(exact - static_cast<double>(quota[s]), s);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i) {
    const std::size_t s = remainders[i].second;
    if (quota[s] < strata[s].size()) {
      ++quota[s];
      ++assigned;
    }
  }

  Prng prng(seed);
  std::vector<std::size_t> chosen;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    auto members = strata[s];
    prng.shuffle(members);
    chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[s]));
    if (s < K && quota[s] == 0 && !strata[s].empty()) {
      out.warnings.push_back("class '" + data.label_names[s] + "' has no examples at fraction " +
                             std::to_string(fraction));
    }
  }
  std::sort(chosen.begin(), chosen.end());
  out.data.examples.clear();
  for (auto i : chosen) out.data.examples.push_back(data.examples[i]);
  return out;
}

LossReport fit(const Dataset& data, ModelParams& params, const TrainConfig& config) {
  config.validate();
  params.validate();
  if (data.examples.empty()) throw ArgumentError("cannot train on an empty dataset");
  if (data.mode != params.mode) {
    throw ArgumentError("dataset is " + std::string(to_string(data.mode)) + "-label but model is " +
                        std::string(to_string(params.mode)) + "-label");
  }
  if (data.num_classes() != params.num_classes()) {
    throw ArgumentError("dataset has " + std::to_string(data.num_classes()) + " classes, model has " +
                        std::to_string(params.num_classes()));
  }

  LossReport report;
  Subsample sample = subsample(data, config.labeled_fraction, config.seed);
  report.warnings = std::move(sample.warnings);
  const std::vector<Example>& examples = sample.data.examples;
  report.examples_used = examples.size();

  const AdamConfig adam{config.lr, config.beta1, config.beta2, config.eps};
  std::vector<AdamState> states;
  for (Param* p : params.params()) states.emplace_back(*p, adam);

  Prng prng(config.seed);
  std::vector<std::size_t> order(examples.size());
  std::vector<Example> batch;
  std::vector<Vector> masks;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    prng.shuffle(order);
    EpochLoss sum;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      masks.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(examples[order[i]]);
        if (config.dropout_rate > 0.0) masks.push_back(dropout_mask(params.dim(), config.dropout_rate, prng));
      }
      params.zero_grads();
      const BatchLoss loss = batch_gradients(params, batch, config.variant, config.reg_weight, masks,
                                             config.freeze_embeddings, config.workers);
      auto all = params.params();
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (config.freeze_embeddings && all[i] == &params.V) continue;
        adam_update(*all[i], states[i]);
      }
      sum.data += loss.data;
      sum.reg += loss.reg;
      ++batches;
    }
    EpochLoss e;
    e.data = sum.data / static_cast<double>(batches);
    e.reg = sum.reg / static_cast<double>(batches);
    e.total = e.data + config.reg_weight * e.reg;
    report.epochs.push_back(e);
  }
  params.zero_grads();
  return report;
}

}  // namespace leam
