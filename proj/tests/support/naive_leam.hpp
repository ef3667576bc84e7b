#pragma once

// Scalar re-implementation of the forward passes over plain nested vectors.
// Shares no code with the library; used as the oracle in model tests.

#include <cmath>
#include <cstddef>
#include <vector>

namespace naive {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major, Mat[row][col]

struct Weights {
  Mat V;   // P x vocab
  Mat C;   // P x K
  Vec W1;  // 2r+1
  Vec b1;  // K
  Mat W2;  // K x P
  Vec b2;  // K
  int r = 0;
  bool multi = false;
};

struct Trace {
  Mat G, u;
  Vec m, beta, z, logits, probs;
};

enum class Kind { leam, linear, swem_mean, swem_max };

inline Trace run(const Weights& w, const std::vector<std::size_t>& tokens, Kind kind) {
  const std::size_t P = w.V.size(), K = w.C[0].size(), L = tokens.size();
  Trace t;
  std::vector<bool> real(L);
  for (std::size_t l = 0; l < L; ++l) real[l] = tokens[l] != 0;
  std::size_t n_real = 0;
  for (bool b : real) n_real += b ? 1 : 0;

  if (kind == Kind::leam || kind == Kind::linear) {
    t.G.assign(K, Vec(L, 0.0));
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t l = 0; l < L; ++l) {
        double d = 0, nc = 0, nv = 0;
        for (std::size_t p = 0; p < P; ++p) {
          const double c = w.C[p][k], v = w.V[p][tokens[l]];
          d += c * v;
          nc += c * c;
          nv += v * v;
        }
        double denom = std::sqrt(nc) * std::sqrt(nv);
        if (denom < 1e-8) denom = 1e-8;
        t.G[k][l] = d / denom;
      }
    }
    if (kind == Kind::leam) {
      t.u.assign(K, Vec(L, 0.0));
      for (std::size_t k = 0; k < K; ++k) {
        for (int l = 0; l < static_cast<int>(L); ++l) {
          double s = w.b1[k];
          for (int j = -w.r; j <= w.r; ++j) {
            const int pos = l + j;
            if (pos < 0 || pos >= static_cast<int>(L)) continue;
            s += t.G[k][pos] * w.W1[j + w.r];
          }
          t.u[k][l] = s > 0 ? s : 0;
        }
      }
    } else {
      t.u = t.G;
    }
    t.m.assign(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
      double best = t.u[0][l];
      for (std::size_t k = 1; k < K; ++k) best = std::max(best, t.u[k][l]);
      t.m[l] = best;
    }
    double total = 0;
    t.beta.assign(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
      if (real[l]) total += std::exp(t.m[l]);
    }
    for (std::size_t l = 0; l < L; ++l) t.beta[l] = real[l] ? std::exp(t.m[l]) / total : 0.0;
  } else {
    t.beta.assign(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) t.beta[l] = real[l] ? 1.0 / static_cast<double>(n_real) : 0.0;
  }

  t.z.assign(P, 0.0);
  for (std::size_t p = 0; p < P; ++p) {
    if (kind == Kind::swem_max) {
      bool first = true;
      for (std::size_t l = 0; l < L; ++l) {
        if (!real[l]) continue;
        const double v = w.V[p][tokens[l]];
        if (first || v > t.z[p]) t.z[p] = v;
        first = false;
      }
    } else if (kind == Kind::swem_mean) {
      double s = 0;
      for (std::size_t l = 0; l < L; ++l) {
        if (real[l]) s += w.V[p][tokens[l]];
      }
      t.z[p] = s / static_cast<double>(n_real);
    } else {
      for (std::size_t l = 0; l < L; ++l) t.z[p] += t.beta[l] * w.V[p][tokens[l]];
    }
  }

  t.logits.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    t.logits[k] = w.b2[k];
    for (std::size_t p = 0; p < P; ++p) t.logits[k] += w.W2[k][p] * t.z[p];
  }
  t.probs.assign(K, 0.0);
  if (w.multi) {
    for (std::size_t k = 0; k < K; ++k) t.probs[k] = 1.0 / (1.0 + std::exp(-t.logits[k]));
  } else {
    double total = 0;
    for (double x : t.logits) total += std::exp(x);
    for (std::size_t k = 0; k < K; ++k) t.probs[k] = std::exp(t.logits[k]) / total;
  }
  return t;
}

}  // namespace naive
