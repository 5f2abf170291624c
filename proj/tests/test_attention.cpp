#include <doctest.h>

#include <cmath>
#include <random>

#include "gad/attention.hpp"
#include "gad/errors.hpp"
#include "test_util.hpp"

using namespace gad;

namespace {

double loss(const MultiChannelField& x, const AttentionGrid& a, const MultiChannelField& g) {
  const auto f = attention_forward(x, a);
  double s = 0.0;
  for (int c = 0; c < f.channels(); ++c)
    for (std::size_t i = 0; i < f[c].size(); ++i) s += g[c].values()[i] * f[c].values()[i];
  return s;
}

double pearson(const ScalarField& a, const ScalarField& b) {
  const double n = static_cast<double>(a.size());
  const double ma = a.sum() / n, mb = b.sum() / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a.values()[i] - ma, db = b.values()[i] - mb;
    sab += da * db, saa += da * da, sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("fresh grid is the identity") {
  std::mt19937_64 rng(1);
  const auto x = test::random_stack(3, 6, 7, rng, -2, 2);
  const auto a = AttentionGrid::zeros(6, 7);
  const auto weights = a.weights();
  for (double w : weights.values()) CHECK(w == 0.5);
  const auto f = attention_forward(x, a);
  CHECK(test::max_abs_diff(f, x) < 1e-12);
  CHECK(global_average_pool(f) == global_average_pool(x));
}

TEST_CASE("global_average_pool") {
  CHECK(global_average_pool(MultiChannelField(1, 3, 3, 4.0))[0] == 4.0);
  CHECK(global_average_pool(MultiChannelField(ScalarField(2, 2, std::vector<double>{0, 1, 2, 3})))[0] == 1.5);
  CHECK(global_average_pool(MultiChannelField(1, 1, 1, -0.3))[0] == -0.3);
}

TEST_CASE("attention_forward") {
  SUBCASE("worked two-cell example") {
    const MultiChannelField x(ScalarField(1, 2, std::vector<double>{2, 4}));
    const AttentionGrid a(ScalarField(1, 2, std::vector<double>{0.0, std::log(3.0)}));
    CHECK(global_average_pool(attention_forward(x, a))[0] == doctest::Approx(3.2).epsilon(1e-14));
  }
  SUBCASE("constant features pool to the constant") {
    std::mt19937_64 rng(2);
    const AttentionGrid a(test::random_field(4, 5, rng, -3, 3));
    CHECK(global_average_pool(attention_forward(MultiChannelField(2, 4, 5, 1.7), a))[1] ==
          doctest::Approx(1.7).epsilon(1e-14));
  }
  SUBCASE("pooling is the weighted average") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = test::random_stack(3, 4, 5, rng, -1, 1);
      const AttentionGrid a(test::random_field(4, 5, rng, -4, 4));
      const auto w = a.weights();
      const auto gap = global_average_pool(attention_forward(x, a));
      for (int c = 0; c < 3; ++c) {
        double num = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) num += w.values()[i] * x[c].values()[i];
        CHECK(gap[c] == doctest::Approx(num / w.sum()).epsilon(1e-12));
      }
    }
  }
  SUBCASE("a common scale on all weights cancels") {
    std::mt19937_64 rng(4);
    const auto x = test::random_stack(2, 3, 3, rng, -1, 1);
    const auto w = test::random_field(3, 3, rng, 0.05, 0.9);
    ScalarField half = w;
    for (double& v : half.values()) v *= 0.5;
    const auto fa = attention_forward(x, AttentionGrid::from_weights(w));
    const auto fb = attention_forward(x, AttentionGrid::from_weights(half));
    CHECK(test::max_abs_diff(fa, fb) < 1e-12);
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(attention_forward(MultiChannelField(1, 3, 3), AttentionGrid::zeros(3, 4)), ShapeError);
  }
}

TEST_CASE("attention_backward") {
  std::mt19937_64 rng(5);
  SUBCASE("matches central differences") {
    const double h = 1e-4;
    for (int trial = 0; trial < 5; ++trial) {
      auto x = test::random_stack(3, 4, 5, rng, -1, 1);
      AttentionGrid a(test::random_field(4, 5, rng, -1, 1));
      const auto g = test::random_stack(3, 4, 5, rng, -1, 1);
      const auto grads = attention_backward(x, a, g);
      double err = 0.0;
      for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < x[c].size(); ++i) {
          const double keep = x[c].values()[i];
          x[c].values()[i] = keep + h;
          const double up = loss(x, a, g);
          x[c].values()[i] = keep - h;
          const double dn = loss(x, a, g);
          x[c].values()[i] = keep;
          err = std::max(err, std::abs((up - dn) / (2 * h) - grads.grad_x[c].values()[i]));
        }
      for (std::size_t i = 0; i < a.logits().size(); ++i) {
        const double keep = a.logits().values()[i];
        a.logits().values()[i] = keep + h;
        const double up = loss(x, a, g);
        a.logits().values()[i] = keep - h;
        const double dn = loss(x, a, g);
        a.logits().values()[i] = keep;
        err = std::max(err, std::abs((up - dn) / (2 * h) - grads.grad_logits.values()[i]));
      }
      CHECK(err < 1e-6);
    }
  }
  SUBCASE("zero upstream and linearity") {
    const auto x = test::random_stack(2, 3, 4, rng, -1, 1);
    const AttentionGrid a(test::random_field(3, 4, rng, -1, 1));
    const auto zero = attention_backward(x, a, MultiChannelField(2, 3, 4));
    for (const auto& p : zero.grad_x.planes())
      for (double v : p.values()) CHECK(v == 0.0);
    for (double v : zero.grad_logits.values()) CHECK(v == 0.0);

    const auto g = test::random_stack(2, 3, 4, rng, -1, 1);
    MultiChannelField g2 = g;
    for (auto& p : g2.planes())
      for (double& v : p.values()) v *= 2.0;
    const auto one = attention_backward(x, a, g);
    const auto two = attention_backward(x, a, g2);
    for (int c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < one.grad_x[c].size(); ++i)
        CHECK(two.grad_x[c].values()[i] == doctest::Approx(2 * one.grad_x[c].values()[i]).epsilon(1e-14));
    for (std::size_t i = 0; i < one.grad_logits.size(); ++i)
      CHECK(two.grad_logits.values()[i] == doctest::Approx(2 * one.grad_logits.values()[i]).epsilon(1e-12));
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(attention_backward(MultiChannelField(2, 3, 3), AttentionGrid::zeros(3, 3),
                                       MultiChannelField(1, 3, 3)),
                    ShapeError);
  }
}

TEST_CASE("sharpen_attention") {
  std::mt19937_64 rng(6);
  SUBCASE("zero iterations round-trip the logits") {
    const AttentionGrid a(test::random_field(5, 5, rng, -3, 3));
    const std::vector guides{test::random_stack(3, 20, 20, rng)};
    const auto out = sharpen_attention(a, guides, GadParams{0.05, 0.24, 0});
    CHECK(test::max_abs_diff(out.logits(), a.logits()) < 1e-9);
  }
  SUBCASE("uniform attention with constant guides stays uniform") {
    const AttentionGrid a(ScalarField(4, 4, 0.8));
    const std::vector guides{MultiChannelField(3, 16, 16, 0.2), MultiChannelField(3, 16, 16, 0.9)};
    const auto out = sharpen_attention(a, guides, GadParams{0.05, 0.24, 50});
    for (double v : out.logits().values()) CHECK(v == doctest::Approx(0.8).epsilon(1e-9));
  }
  SUBCASE("weights align with the guide object") {
    // 10x10 grid, 40x40 guide with a bright centred 16x16 square. The input
    // attention is a broad centred bump that spills past the square.
    const int m = 10, factor = 4, n = m * factor;
    ScalarField bump(m, m);
    ScalarField inside(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        const double dy = r - 4.5, dx = c - 4.5;
        bump(r, c) = 0.15 + 0.7 * std::exp(-(dx * dx + dy * dy) / 12.0);
        inside(r, c) = (r >= 3 && r < 7 && c >= 3 && c < 7) ? 1.0 : 0.0;
      }
    ScalarField guide(n, n);
    for (int r = 12; r < 28; ++r)
      for (int c = 12; c < 28; ++c) guide(r, c) = 1.0;
    const auto a = AttentionGrid::from_weights(bump);
    const auto out = sharpen_attention(a, std::vector{MultiChannelField(guide)}, GadParams{0.05, 0.24, 500});
    const auto w = out.weights();
    for (double v : w.values()) CHECK((v > 0.0 && v < 1.0));
    CHECK(pearson(w, inside) > pearson(bump, inside));
  }
  SUBCASE("guides must be an integer multiple of the grid") {
    const std::vector guides{MultiChannelField(1, 10, 12)};
    CHECK_THROWS_AS(sharpen_attention(AttentionGrid::zeros(4, 4), guides, GadParams{0.05, 0.24, 5}), ShapeError);
  }
}
