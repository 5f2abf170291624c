#include <doctest.h>

#include <array>
#include <random>

#include "gad/errors.hpp"
#include "gad/labels.hpp"
#include "gad/metrics.hpp"
#include "gad/synth.hpp"
#include "test_util.hpp"

using namespace gad;

namespace {

LabelMap binary_map(int h, int w, std::vector<std::uint8_t> ids) { return LabelMap(h, w, std::move(ids)); }

LabelMap random_binary(int h, int w, std::mt19937_64& rng) {
  std::vector<std::uint8_t> ids(static_cast<std::size_t>(h) * w);
  for (auto& v : ids) v = static_cast<std::uint8_t>(rng() & 1u);
  return binary_map(h, w, std::move(ids));
}

constexpr std::array kStrategies{MergeStrategy::Intersection, MergeStrategy::IgnoreFalseNegatives,
                                 MergeStrategy::IgnoreAllDisagreements};

}  // namespace

TEST_CASE("LabelMap invariants") {
  CHECK_THROWS_AS(LabelMap(1, 2, std::vector<std::uint8_t>{0, 3}), DomainError);
  CHECK_NOTHROW(LabelMap(1, 2, std::vector<std::uint8_t>{0, 2}));
  CHECK_THROWS_AS(LabelMap(2, 2, 3, 2), InvalidArgument);  // ignore collides with class 2
  CHECK_NOTHROW(LabelMap(2, 2, 5, 255));
}

TEST_CASE("strategy names") {
  for (auto s : kStrategies) CHECK(parse_merge_strategy(to_string(s)) == s);
  CHECK(to_string(MergeStrategy::IgnoreFalseNegatives) == "ignore-fn");
  CHECK_THROWS_AS(parse_merge_strategy("union"), InvalidArgument);
}

TEST_CASE("binarize") {
  const ScalarField p(1, 4, std::vector<double>{0.7, 0.5, 0.0, 1.0});
  const auto m = binarize(p, 0.5);
  CHECK(m(0, 0) == 1);
  CHECK(m(0, 1) == 0);  // ties go to 0
  CHECK(m(0, 2) == 0);
  CHECK(m(0, 3) == 1);
  const auto zeros = binarize(ScalarField(3, 3), 0.5);
  for (auto id : zeros.ids()) CHECK(id == 0);
  CHECK_THROWS_AS(binarize(ScalarField(1, 1, 1.1), 0.5), DomainError);
  CHECK_NOTHROW(binarize(ScalarField(1, 1, 1.0 + 5e-7), 0.5));
  CHECK_THROWS_AS(binarize(p, 1.0), InvalidArgument);
}

TEST_CASE("merge truth tables") {
  // Pixels enumerate (orig, pred) = (0,0), (1,0), (0,1), (1,1).
  const auto orig = binary_map(1, 4, {0, 1, 0, 1});
  const auto pred = binary_map(1, 4, {0, 0, 1, 1});
  auto row = [&](MergeStrategy s) {
    const auto m = merge(orig, pred, s);
    return std::vector<int>(m.ids().begin(), m.ids().end());
  };
  CHECK(row(MergeStrategy::Intersection) == std::vector<int>{0, 0, 0, 1});
  CHECK(row(MergeStrategy::IgnoreFalseNegatives) == std::vector<int>{0, 2, 0, 1});
  CHECK(row(MergeStrategy::IgnoreAllDisagreements) == std::vector<int>{0, 2, 2, 1});
}

TEST_CASE("merge errors") {
  CHECK_THROWS_AS(merge(binary_map(1, 2, {0, 2}), binary_map(1, 2, {0, 1}), MergeStrategy::Intersection),
                  DomainError);
  CHECK_THROWS_AS(merge(binary_map(1, 2, {0, 1}), binary_map(2, 1, {0, 1}), MergeStrategy::Intersection),
                  ShapeError);
}

TEST_CASE("merge properties") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int h = 1 + static_cast<int>(rng() % 8);
    const int w = 1 + static_cast<int>(rng() % 8);
    const auto orig = random_binary(h, w, rng);
    const auto pred = random_binary(h, w, rng);
    for (auto s : kStrategies) {
      CHECK(merge(orig, orig, s) == orig);
      const auto m = merge(orig, pred, s);
      for (std::size_t i = 0; i < m.size(); ++i) {
        const auto o = orig.ids()[i];
        const auto p = pred.ids()[i];
        const auto v = m.ids()[i];
        if (o == p) CHECK(v == o);
        if (s == MergeStrategy::Intersection && v == 1) CHECK((o == 1 && p == 1));
        if (s == MergeStrategy::IgnoreAllDisagreements && v != 2) CHECK((v == o || v == p));
      }
    }
  }
}

TEST_CASE("class_weights") {
  SUBCASE("130 to 1 imbalance") {
    std::vector<std::uint8_t> ids(131, 0);
    ids.back() = 1;
    const std::array maps{LabelMap(1, 131, ids)};
    const auto w = class_weights(maps);
    CHECK(w(0) == doctest::Approx(131.0 / 260.0).epsilon(1e-15));
    CHECK(w(1) == 65.5);
    CHECK(w(1) / w(0) == doctest::Approx(130.0).epsilon(1e-12));
    CHECK(w(2) == 0.0);
  }
  SUBCASE("balanced counts") {
    const std::array maps{binary_map(2, 2, {0, 1, 1, 0}), binary_map(1, 2, {1, 0})};
    const auto w = class_weights(maps);
    CHECK(w(0) == 1.0);
    CHECK(w(1) == 1.0);
  }
  SUBCASE("ignore pixels are excluded") {
    const std::array maps{binary_map(1, 6, {0, 0, 0, 1, 2, 2})};
    const auto w = class_weights(maps);
    CHECK(w(0) == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
    CHECK(w(1) == 2.0);
    CHECK(w(2) == 0.0);
    CHECK(w(0) * 3 + w(1) * 1 == doctest::Approx(4.0).epsilon(1e-15));
  }
  SUBCASE("missing class") {
    const std::array maps{binary_map(1, 3, {0, 0, 2})};
    try {
      class_weights(maps);
      FAIL("expected MissingClassError");
    } catch (const MissingClassError& e) {
      CHECK(e.classes() == std::vector<int>{1});
    }
  }
  SUBCASE("weighted counts equal the pixel total") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::uint8_t> ids(200);
      for (auto& v : ids) v = static_cast<std::uint8_t>(rng() % 4);  // 3 = ignore
      ids[0] = 0, ids[1] = 1, ids[2] = 2;
      const std::array maps{LabelMap(10, 20, ids, 3, 3)};
      const auto w = class_weights(maps);
      std::array<int, 3> counts{};
      int total = 0;
      for (auto v : ids)
        if (v < 3) ++counts[v], ++total;
      double acc = 0.0;
      for (int c = 0; c < 3; ++c) acc += w(c) * counts[c];
      CHECK(acc == doctest::Approx(total).epsilon(1e-12));
      CHECK(w(3) == 0.0);
    }
  }
}

TEST_CASE("cleanse") {
  const auto sc = synth::make_square({.size = 32, .side = 12, .dilation = 3, .seed = 4});
  const std::vector guides{sc.guide};

  SUBCASE("zero iterations with prediction = original") {
    for (auto s : kStrategies)
      CHECK(cleanse(sc.noisy_labels, sc.noisy_prob, guides, GadParams{0.05, 0.24, 0}, s) ==
            sc.noisy_labels);
  }
  SUBCASE("zero iterations reduce to merge(binarize)") {
    std::mt19937_64 rng(5);
    const auto prob = test::random_field(32, 32, rng);
    CHECK(cleanse(sc.noisy_labels, prob, guides, GadParams{0.05, 0.24, 0}, MergeStrategy::Intersection) ==
          merge(sc.noisy_labels, binarize(prob), MergeStrategy::Intersection));
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(cleanse(sc.noisy_labels, ScalarField(31, 32), guides, GadParams{},
                            MergeStrategy::Intersection),
                    ShapeError);
  }
}

TEST_CASE("square scenario regression") {
  // Reference-kernel values for the seeded 64x64 square, dilation 6.
  const auto sc = synth::make_square({.size = 64, .side = 24, .dilation = 6, .seed = 1});
  const GadParams params{0.05, 0.24, 1000};
  const std::vector guides{sc.guide};
  const double in = dice(confusion(sc.noisy_labels, sc.truth), 1);
  CHECK(in == doctest::Approx(0.61538461538461542).epsilon(1e-15));

  const auto ref = gad_filter(MultiChannelField(sc.noisy_prob), guides, params, Kernel::Reference);
  const auto opt = gad_filter(MultiChannelField(sc.noisy_prob), guides, params, Kernel::Optimized);
  CHECK(test::max_abs_diff(ref, opt) <= 1e-9);
  CHECK(ref[0](30, 30) == doctest::Approx(0.934460).epsilon(1e-6));
  CHECK(dice(confusion(binarize(ref[0]), sc.truth), 1) == 1.0);
  CHECK(dice(confusion(binarize(opt[0]), sc.truth), 1) == 1.0);

  // Intersection keeps only pixels both maps call change, which here is the square itself.
  const auto merged = cleanse(sc.noisy_labels, sc.noisy_prob, guides, params, MergeStrategy::Intersection);
  CHECK(dice(confusion(merged, sc.truth), 1) == 1.0);
  CHECK(merged == sc.truth);
}
