#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <doctest.h>

#include "gqn/errors.hpp"
#include "gqn/matrix.hpp"
#include "gqn/param.hpp"
#include "gqn/rng.hpp"
#include "support/test_util.hpp"

using namespace gqn;
using testutil::max_abs_diff;
using testutil::random_matrix;

namespace {

// Independent product oracle: plain ijk loops, no zero skipping.
Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        sum += a.at(i, k) * b.at(k, j);
      }
      c.at(i, j) = sum;
    }
  }
  return c;
}

// Textbook Adam on a single coordinate, kept separate from the library loop.
struct ScalarAdam {
  double m = 0.0;
  double v = 0.0;
  long t = 0;

  double step(double w, double g, const AdamConfig& c) {
    t += 1;
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g * g;
    const double mhat = m / (1.0 - std::pow(c.beta1, static_cast<double>(t)));
    const double vhat = v / (1.0 - std::pow(c.beta2, static_cast<double>(t)));
    return w - c.lr * mhat / (std::sqrt(vhat) + c.eps);
  }
};

}  // namespace

TEST_CASE("matmul matches a naive triple-loop oracle") {
  Rng rng(11);
  const std::size_t shapes[][3] = {{1, 1, 1}, {2, 3, 4}, {5, 7, 3},
                                   {8, 8, 8}, {3, 1, 6}, {1, 9, 2}};
  for (const auto& s : shapes) {
    Matrix a = random_matrix(rng, s[0], s[1]);
    Matrix b = random_matrix(rng, s[1], s[2]);
    Matrix expected = naive_matmul(a, b);
    Matrix got = matmul(a, b);
    REQUIRE(got.rows() == expected.rows());
    REQUIRE(got.cols() == expected.cols());
    CHECK(max_abs_diff(got, expected) == 0.0);
  }
}

TEST_CASE("matmul rejects mismatched inner dimensions, naming both shapes") {
  Matrix a(5, 7);
  Matrix b(8, 3);
  try {
    matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("5x7") != std::string::npos);
    CHECK(msg.find("8x3") != std::string::npos);
  }
}

TEST_CASE("identity is a two-sided multiplicative unit, bitwise") {
  Rng rng(12);
  Matrix a = random_matrix(rng, 4, 6);
  CHECK(matmul(a, Matrix::identity(6)) == a);
  CHECK(matmul(Matrix::identity(4), a) == a);
}

TEST_CASE("transpose round-trips and swaps shape") {
  Rng rng(13);
  Matrix a = random_matrix(rng, 3, 5);
  Matrix t = transpose(a);
  REQUIRE(t.rows() == 5);
  REQUIRE(t.cols() == 3);
  CHECK(t.at(2, 1) == a.at(1, 2));
  CHECK(transpose(t) == a);
}

TEST_CASE("require_finite names the offending matrix") {
  Matrix m(2, 2);
  m.at(1, 0) = std::nan("");
  CHECK_THROWS_AS(require_finite(m, "layer1.W"), NumericError);
  try {
    require_finite(m, "layer1.W");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("layer1.W") != std::string::npos);
  }
}

TEST_CASE("elementwise add is shape-checked") {
  Matrix a(2, 3, 1.0);
  Matrix b(2, 3, 0.5);
  a.add(b);
  CHECK(a.at(1, 2) == 1.5);
  Matrix c(3, 2);
  CHECK_THROWS_AS(a.add(c), ShapeError);
}

TEST_CASE("xavier init respects the fan bound and the seed") {
  // bound = sqrt(6 / (rows + cols)), computed here from first principles
  const std::size_t rows = 9, cols = 32;
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Rng rng(77);
  Matrix w = xavier_init(rows, cols, rng);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(std::fabs(w[i]) <= bound);
  }
  Rng rng2(77);
  CHECK(xavier_init(rows, cols, rng2) == w);
  CHECK_THROWS_AS(xavier_init(0, 4, rng), ShapeError);
}

TEST_CASE("splitmix64 reproduces the published reference stream") {
  // Reference outputs computed from the original splitmix64 definition
  // (state += 0x9e3779b97f4a7c15, then two xor-multiply mixes).
  Rng r0(0);
  CHECK(r0.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(r0.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(r0.next_u64() == 0x06c45d188009454fULL);

  Rng r1(1234567);
  CHECK(r1.next_u64() == 0x599ed017fb08fc85ULL);
  CHECK(r1.next_u64() == 0x2c73f08458540fa5ULL);
  CHECK(r1.next_u64() == 0x883ebce5a3f27c77ULL);
}

TEST_CASE("uniform doubles sit in [0,1) with a sane mean") {
  Rng rng(42);
  CHECK(rng.uniform() == (0xbdd732262feb6e95ULL >> 11) * 0x1.0p-53);
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // mean of 10k U(0,1) draws: sd ~ 0.0029, allow well over 3 sigma
  CHECK(std::fabs(sum / n - 0.5) < 0.01);
}

TEST_CASE("uniform_int covers its range roughly evenly") {
  Rng rng(7);
  const std::uint64_t n = 7;
  std::vector<int> counts(n, 0);
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t x = rng.uniform_int(n);
    REQUIRE(x < n);
    counts[x] += 1;
  }
  // expected 4285.7 per bucket, sd ~ 60.6; 5 sigma keeps this non-flaky
  for (std::uint64_t k = 0; k < n; ++k) {
    CHECK(counts[k] > 3980);
    CHECK(counts[k] < 4590);
  }
}

TEST_CASE("derive is stateless and separates streams") {
  Rng rng(99);
  const std::uint64_t before = rng.state();
  const std::uint64_t a = Rng::derive(99, 0);
  CHECK(rng.state() == before);
  CHECK(a == Rng::derive(99, 0));
  CHECK(Rng::derive(99, 1) != a);
  CHECK(Rng::derive(100, 0) != a);
}

TEST_CASE("adam matches a per-coordinate scalar reference") {
  Rng rng(5);
  Matrix w1 = random_matrix(rng, 2, 3);
  Matrix g1(2, 3);
  Matrix w2 = random_matrix(rng, 1, 4);
  Matrix g2(1, 4);
  ParamSet params;
  params.add("w1", w1, g1);
  params.add("w2", w2, g2);
  AdamState state = AdamState::for_params(params);
  AdamConfig cfg;
  cfg.lr = 0.01;

  // one scalar oracle per coordinate, fed the same gradient sequence
  std::vector<ScalarAdam> oracle(w1.size() + w2.size());
  std::vector<double> expected(w1.size() + w2.size());
  for (std::size_t i = 0; i < w1.size(); ++i) expected[i] = w1[i];
  for (std::size_t i = 0; i < w2.size(); ++i) expected[w1.size() + i] = w2[i];

  for (int step = 0; step < 7; ++step) {
    for (std::size_t i = 0; i < g1.size(); ++i) g1[i] = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < g2.size(); ++i) g2[i] = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < w1.size(); ++i) {
      expected[i] = oracle[i].step(expected[i], g1[i], cfg);
    }
    for (std::size_t i = 0; i < w2.size(); ++i) {
      expected[w1.size() + i] =
          oracle[w1.size() + i].step(expected[w1.size() + i], g2[i], cfg);
    }
    adam_step(params, state, cfg);
    for (std::size_t i = 0; i < w1.size(); ++i) CHECK(w1[i] == expected[i]);
    for (std::size_t i = 0; i < w2.size(); ++i) {
      CHECK(w2[i] == expected[w1.size() + i]);
    }
  }
  CHECK(state.t == 7);
  // gradients are the caller's to zero
  CHECK(g1.all_finite());
}

TEST_CASE("adam defaults are the training hyperparameters") {
  AdamConfig cfg;
  CHECK(cfg.lr == 1e-4);
  CHECK(cfg.beta1 == 0.9);
  CHECK(cfg.beta2 == 0.999);
  CHECK(cfg.eps == 1e-8);
}

TEST_CASE("adam rejects mismatched optimizer state") {
  Matrix w(2, 2), g(2, 2);
  ParamSet params;
  params.add("w", w, g);
  AdamState state;  // empty on purpose
  AdamConfig cfg;
  CHECK_THROWS_AS(adam_step(params, state, cfg), ConfigError);
}

TEST_CASE("param set rejects duplicates and shape mismatches") {
  Matrix w(2, 2), g(2, 2), bad(1, 2);
  ParamSet params;
  params.add("w", w, g);
  CHECK_THROWS_AS(params.add("w", w, g), ConfigError);
  CHECK_THROWS_AS(params.add("x", w, bad), ConfigError);
  CHECK(params.coordinate_count() == 4);
  CHECK(params.find("w") != nullptr);
  CHECK(params.find("nope") == nullptr);
}

TEST_CASE("finite differences recover a quadratic's gradient") {
  Rng rng(21);
  Matrix w = random_matrix(rng, 3, 2);
  Matrix g(3, 2);
  ParamSet params;
  params.add("w", w, g);
  const Matrix w_before = w;

  auto loss = [&w]() {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * w[i];
    return s;
  };
  std::vector<Matrix> grads = finite_diff_grad(loss, params, 1e-5);
  REQUIRE(grads.size() == 1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(std::fabs(grads[0][i] - 2.0 * w[i]) < 1e-8);
  }
  // parameters restored bit-exactly
  CHECK(w == w_before);
  CHECK_THROWS_AS(finite_diff_grad(loss, params, 0.0), ConfigError);
}
