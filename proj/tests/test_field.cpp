#include <doctest.h>

#include <random>

#include "gad/errors.hpp"
#include "gad/field.hpp"
#include "test_util.hpp"

using namespace gad;

TEST_CASE("ScalarField rejects bad construction") {
  CHECK_THROWS_AS(ScalarField(2, 2, std::vector<double>{1, 2, 3}), InvalidArgument);
  CHECK_THROWS_AS(ScalarField(1, 2, std::vector<double>{1, NAN}), DomainError);
  CHECK_THROWS_AS(MultiChannelField(std::vector<ScalarField>{}), InvalidArgument);
  CHECK_THROWS_AS(MultiChannelField(std::vector<ScalarField>{ScalarField(2, 2), ScalarField(2, 3)}),
                  ShapeError);
}

TEST_CASE("gradient_edges on a 1x2 field") {
  const auto e = gradient_edges(ScalarField(1, 2, std::vector<double>{0, 3}));
  CHECK(e.east(0, 0) == 3.0);
  CHECK(e.east(0, 1) == 0.0);
  CHECK(e.south(0, 0) == 0.0);
  CHECK(e.south(0, 1) == 0.0);
}

TEST_CASE("gradient_edges of a constant field is zero") {
  const auto e = gradient_edges(ScalarField(5, 7, 2.5));
  for (double v : e.east.values()) CHECK(v == 0.0);
  for (double v : e.south.values()) CHECK(v == 0.0);
}

TEST_CASE("gradient_edges around a unit impulse") {
  ScalarField f(3, 3);
  f(1, 1) = 1.0;
  const auto e = gradient_edges(f);
  // Enumerated by hand: only the four edges touching the centre are non-zero.
  CHECK(e.east(1, 1) == -1.0);
  CHECK(e.south(1, 1) == -1.0);
  CHECK(e.east(1, 0) == 1.0);
  CHECK(e.south(0, 1) == 1.0);
  int nonzero = 0;
  for (double v : e.east.values()) nonzero += v != 0.0;
  for (double v : e.south.values()) nonzero += v != 0.0;
  CHECK(nonzero == 4);
  for (int r = 0; r < 3; ++r) CHECK(e.east(r, 2) == 0.0);
  for (int c = 0; c < 3; ++c) CHECK(e.south(2, c) == 0.0);
}

TEST_CASE("signed incident differences telescope to zero") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int h = 1 + static_cast<int>(rng() % 12);
    const int w = 1 + static_cast<int>(rng() % 12);
    const auto f = test::random_field(h, w, rng, -5, 5);
    const auto e = gradient_edges(f);
    double total = 0.0;
    double scale = 0.0;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        double s = e.east(r, c) + e.south(r, c);
        if (c > 0) s -= e.east(r, c - 1);
        if (r > 0) s -= e.south(r - 1, c);
        total += s;
        scale += std::abs(s);
      }
    CHECK(std::abs(total) <= 1e-12 * (1.0 + scale));
  }
}

TEST_CASE("bilinear_upsample") {
  SUBCASE("worked 1x2 example") {
    const MultiChannelField f(ScalarField(1, 2, std::vector<double>{0, 1}));
    const auto up = bilinear_upsample(f, 2);
    REQUIRE(up.height() == 2);
    REQUIRE(up.width() == 4);
    for (int r = 0; r < 2; ++r) {
      CHECK(up[0](r, 0) == 0.0);
      CHECK(up[0](r, 1) == 0.25);
      CHECK(up[0](r, 2) == 0.75);
      CHECK(up[0](r, 3) == 1.0);
    }
  }
  SUBCASE("factor 1 is the identity") {
    std::mt19937_64 rng(3);
    const auto f = test::random_stack(2, 5, 6, rng);
    CHECK(bilinear_upsample(f, 1) == f);
  }
  SUBCASE("constants stay constant") {
    const MultiChannelField f(3, 4, 5, 0.3);
    const auto up = bilinear_upsample(f, 3);
    CHECK(up.height() == 12);
    CHECK(up.width() == 15);
    for (const auto& p : up.planes())
      for (double v : p.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-15));
  }
  SUBCASE("zero factor") {
    CHECK_THROWS_AS(bilinear_upsample(MultiChannelField(1, 2, 2), 0), InvalidArgument);
  }
  SUBCASE("outputs stay within the input range") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
      const auto f = test::random_stack(1, 1 + rng() % 6, 1 + rng() % 6, rng, -2, 3);
      const auto up = bilinear_upsample(f, 1 + static_cast<int>(rng() % 5));
      CHECK(up[0].min() >= f[0].min());
      CHECK(up[0].max() <= f[0].max());
    }
  }
  SUBCASE("cropped output matches the full grid") {
    std::mt19937_64 rng(5);
    const auto f = test::random_stack(1, 3, 4, rng);
    const auto full = bilinear_upsample(f, 4);
    const auto crop = bilinear_upsample(f, 4, 10, 13);
    for (int r = 0; r < 10; ++r)
      for (int c = 0; c < 13; ++c) CHECK(crop[0](r, c) == full[0](r, c));
    CHECK_THROWS_AS(bilinear_upsample(f, 4, 13, 13), ShapeError);
  }
}

TEST_CASE("box_downsample") {
  SUBCASE("block mean") {
    const MultiChannelField f(ScalarField(2, 2, std::vector<double>{0, 1, 1, 0}));
    const auto d = box_downsample(f, 2);
    REQUIRE(d.height() == 1);
    CHECK(d[0](0, 0) == 0.5);
  }
  SUBCASE("factor 1 is the identity") {
    std::mt19937_64 rng(9);
    const auto f = test::random_stack(3, 4, 4, rng);
    CHECK(box_downsample(f, 1) == f);
  }
  SUBCASE("non-divisible sizes replicate the last row and column") {
    const MultiChannelField f(ScalarField(3, 3, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9}));
    const auto d = box_downsample(f, 2);
    REQUIRE(d.height() == 2);
    REQUIRE(d.width() == 2);
    CHECK(d[0](0, 0) == 3.0);
    CHECK(d[0](0, 1) == 4.5);
    CHECK(d[0](1, 0) == 7.5);
    CHECK(d[0](1, 1) == 9.0);
  }
  SUBCASE("constant round trip through down and up sampling") {
    const MultiChannelField f(2, 8, 8, 0.625);
    const auto back = bilinear_upsample(box_downsample(f, 4), 4);
    CHECK(back == f);
  }
  SUBCASE("zero factor") { CHECK_THROWS_AS(box_downsample(MultiChannelField(1, 2, 2), 0), InvalidArgument); }
}
