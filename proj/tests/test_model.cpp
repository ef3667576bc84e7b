#include <cmath>
#include <vector>

#include "doctest.h"
#include "leam/error.hpp"
#include "leam/gradcheck.hpp"
#include "leam/model.hpp"
#include "support/naive_leam.hpp"
#include "support/random_model.hpp"

using leam::Matrix;
using leam::Vector;
using Tokens = std::vector<std::size_t>;

namespace {

leam::ModelParams make_params(Matrix V, Matrix C, Matrix W1, Matrix b1, Matrix W2, Matrix b2, std::size_t r,
                              leam::Mode mode = leam::Mode::single) {
  leam::ModelParams p;
  p.V = leam::Param(std::move(V));
  p.C = leam::Param(std::move(C));
  p.W1 = leam::Param(std::move(W1));
  p.b1 = leam::Param(std::move(b1));
  p.W2 = leam::Param(std::move(W2));
  p.b2 = leam::Param(std::move(b2));
  p.r = r;
  p.mode = mode;
  return p;
}

bool close(const Vector& a, const Vector& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

bool close(const Matrix& a, const naive::Mat& b, double tol) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (!close(Vector(a.row(i).begin(), a.row(i).end()), b[i], tol)) return false;
  }
  return a.rows() == b.size();
}

// Zero-padded window sum written out directly.
Matrix window_oracle(const Matrix& G, const Vector& W1, const Vector& b1, int r) {
  Matrix u(G.rows(), G.cols());
  for (std::size_t k = 0; k < G.rows(); ++k) {
    for (int l = 0; l < static_cast<int>(G.cols()); ++l) {
      double s = b1[k];
      for (int j = 0; j < 2 * r + 1; ++j) {
        const int pos = l - r + j;
        const double g = pos < 0 || pos >= static_cast<int>(G.cols()) ? 0.0 : G(k, pos);
        s += g * W1[j];
      }
      u(k, l) = std::max(0.0, s);
    }
  }
  return u;
}

}  // namespace

TEST_CASE("compatibility is cosine with a floored denominator") {
  const Matrix C = Matrix::identity(2);
  CHECK(leam::compatibility(C, Matrix::from_rows({{1}, {0}})) == Matrix::from_rows({{1}, {0}}));
  const Matrix g = leam::compatibility(C, Matrix::from_rows({{1}, {1}}));
  CHECK(g(0, 0) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(g(1, 0) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(leam::compatibility(C, Matrix(2, 1)) == Matrix(2, 1));
}

TEST_CASE("compatibility is invariant to positive scaling of a word vector") {
  leam::Prng prng(21);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix C(5, 3), v(5, 1);
    for (double& x : C.data()) x = prng.normal();
    for (double& x : v.data()) x = prng.normal();
    Matrix scaled = v;
    const double a = std::exp(prng.uniform(-5, 5));
    for (double& x : scaled.data()) x *= a;
    const Matrix g1 = leam::compatibility(C, v), g2 = leam::compatibility(C, scaled);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(std::abs(g1(k, 0) - g2(k, 0)) <= 1e-12);
      CHECK(std::abs(g1(k, 0)) <= 1.0);
    }
  }
}

TEST_CASE("phrase_compat") {
  leam::Prng prng(22);
  const Matrix G = Matrix::from_rows({{0.3, -0.2, 0.9}, {-0.5, 0.1, 0.4}});
  const Vector zero_b{0, 0};
  CHECK(leam::phrase_compat(G, Vector{1}, zero_b, 0) == leam::relu(G));
  CHECK(leam::phrase_compat(G, Vector{0, 1, 0}, zero_b, 1) == leam::relu(G));
  const Matrix hand = leam::phrase_compat(Matrix::from_rows({{1, 2}}), Vector{1, 1, 1}, Vector{0}, 1);
  CHECK(hand == Matrix::from_rows({{3, 3}}));
  CHECK(hand == window_oracle(Matrix::from_rows({{1, 2}}), {1, 1, 1}, {0}, 1));

  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t K = 1 + prng.below(4), L = 1 + prng.below(9), r = prng.below(4);
    Matrix g(K, L);
    for (double& x : g.data()) x = prng.uniform(-1, 1);
    Vector w(2 * r + 1), b(K);
    for (double& x : w) x = prng.normal();
    for (double& x : b) x = prng.normal();
    const Matrix u = leam::phrase_compat(g, w, b, r);
    const Matrix o = window_oracle(g, w, b, static_cast<int>(r));
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK(std::abs(u.data()[i] - o.data()[i]) <= 1e-12);
      CHECK(u.data()[i] >= 0.0);
    }
  }
}

TEST_CASE("label_maxpool") {
  CHECK(leam::label_maxpool(Matrix::from_rows({{0.2}, {0.7}})) == Vector{0.7});
  CHECK(leam::label_maxpool(Matrix(3, 4)) == Vector(4, 0.0));
  leam::Prng prng(23);
  Matrix u(8, 13);
  for (double& x : u.data()) x = prng.normal();
  const Vector m = leam::label_maxpool(u);
  for (std::size_t l = 0; l < 13; ++l) {
    double best = u(0, l);
    for (std::size_t k = 1; k < 8; ++k) best = u(k, l) > best ? u(k, l) : best;
    CHECK(m[l] == best);
  }
}

TEST_CASE("attention") {
  const std::vector<std::uint8_t> all{1, 1, 1};
  CHECK(close(leam::attention(Vector{0, 0, 0}, all), {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-15));
  const Vector b = leam::attention(Vector{5, 5, 123}, std::vector<std::uint8_t>{1, 1, 0});
  CHECK(b == Vector{0.5, 0.5, 0.0});
  CHECK_THROWS_AS(leam::attention(Vector{1, 2}, std::vector<std::uint8_t>{0, 0}), leam::ArgumentError);
}

TEST_CASE("attention gradient matches finite differences") {
  leam::Prng prng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t L = 1 + prng.below(8);
    Matrix m(1, L);
    std::vector<std::uint8_t> mask(L, 1);
    for (double& x : m.data()) x = prng.normal();
    for (std::size_t l = 1; l < L; ++l) mask[l] = prng.bernoulli(0.8) ? 1 : 0;
    Vector w(L);
    for (double& x : w) x = prng.normal();
    auto f = [&](const Matrix& x) {
      const Vector beta = leam::attention(x.data(), mask);
      double s = 0;
      for (std::size_t l = 0; l < L; ++l) s += w[l] * beta[l];
      return s;
    };
    // d(w . beta)/dm_j = beta_j (w_j - w . beta)
    const Vector beta = leam::attention(m.data(), mask);
    const double wb = f(m);
    Matrix analytic(1, L);
    for (std::size_t j = 0; j < L; ++j) analytic(0, j) = beta[j] * (w[j] - wb);
    CHECK(leam::max_relative_error(analytic, leam::finite_diff_grad(f, m, 1e-5)) <= 1e-6);
  }
}

TEST_CASE("attend") {
  const Matrix vseq = Matrix::from_rows({{1, 0}, {0, 1}});
  CHECK(leam::attend(vseq, Vector{0.25, 0.75}) == Vector{0.25, 0.75});
  CHECK(leam::attend(vseq, Vector{0.0, 1.0}) == Vector{0.0, 1.0});
  CHECK(leam::attend(Matrix::from_rows({{2, 4}, {1, 3}}), Vector{0.5, 0.5}) == Vector{3, 2});
}

TEST_CASE("classify") {
  CHECK(leam::classify(Vector{1, 2}, Matrix(4, 2), Vector(4, 0.0), leam::Mode::single) == Vector(4, 0.25));
  CHECK(leam::classify(Vector{1, 2}, Matrix(3, 2), Vector(3, 0.0), leam::Mode::multi) == Vector(3, 0.5));
  const Matrix W2 = Matrix::from_rows({{1, -1}, {0.5, 2}, {-1, 0}});
  const Vector p = leam::classify(Vector{0.3, 0.8}, W2, Vector{0, 0, 0}, leam::Mode::single);
  const Vector q = leam::classify(Vector{0.3, 0.8}, W2, Vector{7, 7, 7}, leam::Mode::single);
  CHECK(std::max_element(p.begin(), p.end()) - p.begin() == std::max_element(q.begin(), q.end()) - q.begin());
}

TEST_CASE("forward hand computation") {
  // Two orthonormal labels, one token equal to c1, identity classifier.
  leam::ModelParams p = make_params(Matrix::from_rows({{0, 1}, {0, 0}}), Matrix::identity(2),
                                    Matrix::from_rows({{1}}), Matrix(2, 1), Matrix::identity(2), Matrix(2, 1), 0);
  const Tokens toks{1};
  const leam::ForwardTrace t = leam::forward(p, toks);
  CHECK(t.G == Matrix::from_rows({{1}, {0}}));
  CHECK(t.beta == Vector{1.0});
  CHECK(t.z == Vector{1.0, 0.0});
  CHECK(t.probs[0] > 0.5);
}

TEST_CASE("r=0 forward is permutation equivariant") {
  leam::Prng prng(25);
  auto inst = synth::random_instance(prng, 6, 4, 5, 0, leam::Mode::single, 1);
  Tokens toks{1, 2, 3, 4};
  const leam::ForwardTrace a = leam::forward(inst.params, toks);
  std::swap(toks[0], toks[2]);
  const leam::ForwardTrace b = leam::forward(inst.params, toks);
  CHECK(a.beta[0] == doctest::Approx(b.beta[2]).epsilon(1e-14));
  CHECK(a.beta[2] == doctest::Approx(b.beta[0]).epsilon(1e-14));
  CHECK(close(a.z, b.z, 1e-14));
}

TEST_CASE("every variant matches the naive oracle") {
  leam::Prng prng(26);
  for (int trial = 0; trial < 40; ++trial) {
    const auto mode = trial % 2 ? leam::Mode::multi : leam::Mode::single;
    auto inst = synth::random_instance(prng, 9, 4, 6, 2, mode, 1);
    const auto w = synth::to_naive(inst.params);
    const Tokens& toks = inst.batch[0].tokens;
    for (auto v : {leam::Variant::leam, leam::Variant::leam_linear, leam::Variant::swem_mean,
                   leam::Variant::swem_max}) {
      const leam::ForwardTrace t = leam::run_forward(inst.params, toks, v);
      const naive::Trace o = naive::run(w, toks, synth::to_naive(v));
      CHECK(close(t.beta, o.beta, 1e-10));
      CHECK(close(t.z, o.z, 1e-10));
      CHECK(close(t.logits, o.logits, 1e-10));
      CHECK(close(t.probs, o.probs, 1e-10));
      if (v == leam::Variant::leam || v == leam::Variant::leam_linear) {
        CHECK(close(t.G, o.G, 1e-10));
        CHECK(close(t.u, o.u, 1e-10));
        CHECK(close(t.m, o.m, 1e-10));
      }
    }
  }
}

TEST_CASE("trace invariants") {
  leam::Prng prng(27);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = synth::random_instance(prng, 12, 5, 6, 3, leam::Mode::single, 1);
    const leam::ForwardTrace t = leam::forward(inst.params, inst.batch[0].tokens);
    double sum = 0;
    for (std::size_t l = 0; l < t.length(); ++l) {
      sum += t.beta[l];
      if (t.mask[l]) {
        CHECK(t.beta[l] > 0.0);
      } else {
        CHECK(t.beta[l] == 0.0);
      }
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (double g : t.G.data()) CHECK(std::abs(g) <= 1.0);
    for (double u : t.u.data()) CHECK(u >= 0.0);
  }
}

TEST_CASE("PAD context behaves like zero padding") {
  leam::Prng prng(28);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = synth::random_instance(prng, 1, 4, 5, 3, leam::Mode::single, 1);
    inst.params.r = 1 + prng.below(3);
    leam::Matrix W1(inst.params.window(), 1);
    for (double& x : W1.data()) x = prng.normal();
    inst.params.W1 = leam::Param(W1);
    Tokens real;
    for (std::size_t i = 0, n = 1 + prng.below(6); i < n; ++i) real.push_back(1 + prng.below(5));
    Tokens padded(inst.params.r + 2, 0);
    padded.insert(padded.end(), real.begin(), real.end());
    padded.insert(padded.end(), inst.params.r + 1, 0);
    const auto a = leam::forward(inst.params, real);
    const auto b = leam::forward(inst.params, padded);
    const std::size_t off = inst.params.r + 2;
    for (std::size_t k = 0; k < a.u.rows(); ++k) {
      for (std::size_t l = 0; l < real.size(); ++l) CHECK(a.u(k, l) == b.u(k, l + off));
    }
    CHECK(close(a.z, b.z, 1e-15));
  }
}

TEST_CASE("a non-zero stored PAD column is ignored") {
  leam::Prng prng(29);
  auto inst = synth::random_instance(prng, 5, 3, 4, 1, leam::Mode::single, 1);
  const Tokens toks{2, 0, 3};
  const auto a = leam::forward(inst.params, toks);
  for (std::size_t r = 0; r < inst.params.dim(); ++r) inst.params.V.value(r, 0) = 9.0;
  const auto b = leam::forward(inst.params, toks);
  CHECK(a.probs == b.probs);
}

TEST_CASE("forward_linear") {
  // Non-negative G: ReLU and the unit window change nothing.
  leam::ModelParams p = make_params(Matrix::from_rows({{0, 1, 0.5}, {0, 0.2, 1}}), Matrix::from_rows({{1, 0.3}, {0.1, 1}}),
                                    Matrix::from_rows({{1}}), Matrix(2, 1), Matrix::from_rows({{1, 0}, {0, 1}}),
                                    Matrix(2, 1), 0);
  const Tokens toks{1, 2, 1};
  const auto a = leam::forward(p, toks), b = leam::forward_linear(p, toks);
  CHECK(a.beta == b.beta);
  CHECK(a.z == b.z);
  CHECK(b.u == b.G);

  p.b1.value(1, 0) = 2.0;  // lifts label 2 above label 1 everywhere
  const auto c = leam::forward(p, toks);
  CHECK(c.m != b.m);
  CHECK(leam::forward_linear(p, toks).z == b.z);
}

TEST_CASE("forward_swem") {
  leam::ModelParams p = make_params(Matrix::from_rows({{0, 1, 0, 3}, {0, 0, 1, 4}}), Matrix::identity(2),
                                    Matrix::from_rows({{1}}), Matrix(2, 1), Matrix::identity(2), Matrix(2, 1), 0);
  CHECK(leam::forward_swem(p, Tokens{3, 3, 3}, leam::Pool::mean).z == Vector{3, 4});
  CHECK(leam::forward_swem(p, Tokens{1, 2}, leam::Pool::max).z == Vector{1, 1});
  const auto t = leam::forward_swem(p, Tokens{1, 0, 2}, leam::Pool::mean);
  CHECK(t.beta == Vector{0.5, 0.0, 0.5});
  CHECK(t.z == leam::attend(t.vseq, t.beta));
  CHECK(leam::forward_swem(p, Tokens{1, 2, 3}, leam::Pool::max).pool_source == std::vector<std::size_t>{2, 2});
}

TEST_CASE("uniform attention reproduces SWEM mean bit for bit") {
  leam::Prng prng(30);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = synth::random_instance(prng, 9, 4, 6, 2, leam::Mode::single, 1);
    leam::ForwardOptions opts;
    opts.uniform_attention = true;
    const auto a = leam::forward(inst.params, inst.batch[0].tokens, opts);
    const auto b = leam::forward_swem(inst.params, inst.batch[0].tokens, leam::Pool::mean);
    CHECK(a.z == b.z);
  }
}

TEST_CASE("forward_batch parallel matches serial") {
  leam::Prng prng(31);
  auto inst = synth::random_instance(prng, 20, 4, 6, 2, leam::Mode::single, 64);
  for (auto v : {leam::Variant::leam, leam::Variant::swem_max}) {
    const auto a = leam::forward_batch(inst.params, inst.batch, v);
    const auto b = leam::serial::forward_batch(inst.params, inst.batch, v);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].probs == b[i].probs);
  }
}

TEST_CASE("count_params") {
  const leam::ParamCount c = leam::count_params(10, 300, 50, 1000);
  CHECK(c.compositional() == 3111);
  CHECK(c.leading_term() == 3000);
  CHECK(leam::count_params(10, 300, 0, 1).compositional() == 3000 + 1 + 10);
  CHECK(leam::count_params(20, 300, 50, 1).leading_term() == 2 * c.leading_term());

  leam::Prng prng(32);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = synth::random_instance(prng, 3, 6, 8, 4, leam::Mode::single, 1);
    std::size_t entries = 0;
    for (const leam::Param* p : std::as_const(inst.params).params()) entries += p->value.size();
    const leam::ParamCount pc = leam::count_params(inst.params);
    CHECK(pc.total() == entries);
    CHECK(pc.compositional() == inst.params.C.value.size() + inst.params.W1.value.size() + inst.params.b1.value.size());
  }
}

TEST_CASE("validate rejects inconsistent shapes") {
  leam::Prng prng(33);
  auto inst = synth::random_instance(prng, 3, 4, 5, 1, leam::Mode::single, 1);
  CHECK_NOTHROW(inst.params.validate());
  inst.params.W1 = leam::Param(Matrix(2, 1));
  CHECK_THROWS_AS(inst.params.validate(), leam::ShapeError);
  auto one = synth::random_instance(prng, 3, 2, 5, 1, leam::Mode::single, 1);
  one.params.C = leam::Param(Matrix(one.params.dim(), 1));
  one.params.b1 = leam::Param(Matrix(1, 1));
  one.params.W2 = leam::Param(Matrix(1, one.params.dim()));
  one.params.b2 = leam::Param(Matrix(1, 1));
  CHECK_THROWS_AS(one.params.validate(), leam::ArgumentError);
  CHECK_THROWS_AS(leam::forward(inst.params, Tokens{}), leam::Error);
}
