// Times the OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "leam/bench.hpp"
#include "leam/kernels.hpp"
#include "leam/model.hpp"
#include "leam/prng.hpp"

namespace {

double best_of(int repeats, const std::function<void()>& body) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const double t0 = omp_get_wtime();
    body();
    best = std::min(best, omp_get_wtime() - t0);
  }
  return best;
}

leam::Matrix random_matrix(std::size_t rows, std::size_t cols, leam::Prng& prng) {
  leam::Matrix m(rows, cols);
  for (double& x : m.data()) x = prng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  leam::Prng prng(7);

  std::printf("%-28s %12s %12s %8s\n", "kernel", "serial [s]", "omp [s]", "speedup");
  for (std::size_t n : {64, 256, 512}) {
    const auto a = random_matrix(n, n, prng);
    const auto b = random_matrix(n, n, prng);
    const double s = best_of(3, [&] { leam::kernels::serial::matmul(a, b); });
    const double p = best_of(3, [&] { leam::kernels::matmul(a, b); });
    char name[32];
    std::snprintf(name, sizeof name, "matmul %zux%zu", n, n);
    std::printf("%-28s %12.5f %12.5f %8.2f\n", name, s, p, s / p);
  }

  // Batched inference, K=10, P=300, r=50, 256 documents of 200 tokens.
  const std::size_t vocab = 5000;
  const leam::ModelParams params = leam::synthetic_params(10, 300, 50, vocab, 11);
  std::vector<leam::Example> docs(256);
  for (auto& d : docs) {
    d.tokens.resize(200);
    for (auto& t : d.tokens) t = 2 + prng.below(vocab - 2);
  }
  const double s = best_of(3, [&] { leam::serial::forward_batch(params, docs, leam::Variant::leam); });
  const double p = best_of(3, [&] { leam::forward_batch(params, docs, leam::Variant::leam); });
  std::printf("%-28s %12.5f %12.5f %8.2f\n", "forward_batch 256x200", s, p, s / p);
  return 0;
}
