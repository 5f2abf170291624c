#include <doctest.h>

#include <random>

#include "gad/errors.hpp"
#include "gad/metrics.hpp"
#include "gad/synth.hpp"
#include "gad/upsample.hpp"
#include "test_util.hpp"

using namespace gad;

TEST_CASE("simulate_low_res") {
  SUBCASE("ss = 1 is the identity") {
    const LabelMap t(3, 3, std::vector<std::uint8_t>{0, 1, 1, 0, 0, 1, 1, 1, 0});
    const auto oh = one_hot(t);
    CHECK(simulate_low_res(oh, 1) == oh);
  }
  SUBCASE("half and half block") {
    const LabelMap t(2, 2, std::vector<std::uint8_t>{0, 1, 0, 1});
    const auto low = simulate_low_res(one_hot(t), 2);
    REQUIRE(low.height() == 1);
    CHECK(low[0](0, 0) == 0.5);
    CHECK(low[1](0, 0) == 0.5);
  }
  SUBCASE("outputs sum to one") {
    std::mt19937_64 rng(1);
    std::vector<std::uint8_t> ids(13 * 17);
    for (auto& v : ids) v = static_cast<std::uint8_t>(rng() % 4);
    const auto low = simulate_low_res(one_hot(LabelMap(13, 17, ids, 4, 4)), 4);
    for (std::size_t i = 0; i < low[0].size(); ++i) {
      double s = 0.0;
      for (const auto& p : low.planes()) s += p.values()[i];
      CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("argmax ties go to the lowest class") {
  const auto labels = argmax_labels(MultiChannelField(3, 2, 2, 1.0 / 3.0));
  for (auto v : labels.ids()) CHECK(v == 0);
  MultiChannelField p(3, 1, 1);
  p[1](0, 0) = 0.4;
  p[2](0, 0) = 0.4;
  p[0](0, 0) = 0.2;
  CHECK(argmax_labels(p)(0, 0) == 1);
}

TEST_CASE("refine_upsampled") {
  std::mt19937_64 rng(2);
  SUBCASE("identity pipeline") {
    auto probs = test::random_stack(3, 9, 8, rng, 0.01, 1.0);
    for (std::size_t i = 0; i < probs[0].size(); ++i) {
      double s = 0;
      for (auto& p : probs.planes()) s += p.values()[i];
      for (auto& p : probs.planes()) p.values()[i] /= s;
    }
    const auto res = refine_upsampled(probs, test::random_stack(3, 9, 8, rng),
                                      RefinePipelineConfig{1, GadParams{0.002, 0.24, 0}});
    CHECK(res.labels == argmax_labels(probs));
  }
  SUBCASE("uniform probabilities") {
    const MultiChannelField probs(4, 5, 5, 0.25);
    const auto res = refine_upsampled(probs, test::random_stack(3, 20, 20, rng),
                                      RefinePipelineConfig{4, GadParams{0.002, 0.24, 30}});
    for (const auto& p : res.probs.planes())
      for (double v : p.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
    for (auto v : res.labels.ids()) CHECK(v == 0);
  }
  SUBCASE("non-divisible guide sizes crop the upsampled grid") {
    const MultiChannelField probs(2, 3, 4, 0.5);
    const auto res = refine_upsampled(probs, MultiChannelField(1, 10, 13),
                                      RefinePipelineConfig{4, GadParams{0.002, 0.24, 3}});
    CHECK(res.labels.height() == 10);
    CHECK(res.labels.width() == 13);
  }
  SUBCASE("errors") {
    const MultiChannelField probs(2, 4, 4, 0.5);
    CHECK_THROWS_AS(refine_upsampled(probs, MultiChannelField(1, 17, 16), RefinePipelineConfig{4, {}}),
                    ShapeError);
    MultiChannelField bad = probs;
    bad[0](1, 1) = 0.6;
    CHECK_THROWS_AS(refine_upsampled(bad, MultiChannelField(1, 16, 16), RefinePipelineConfig{4, {}}),
                    DomainError);
    CHECK_THROWS_AS(refine_upsampled(probs, MultiChannelField(1, 16, 16), RefinePipelineConfig{0, {}}),
                    InvalidArgument);
  }
}

TEST_CASE("disk scenario regression") {
  // Boundary-band (radius 3) Dice of class 1 without GAD, frozen from the
  // reference kernel; with GAD the band is recovered exactly at every ss.
  const auto disk = synth::make_disk({});
  const auto band = boundary_mask(disk.truth, 3);
  const std::pair<int, double> plain_dice[] = {
      {1, 1.0},
      {4, 0.97760786455488802},
      {8, 0.94130925507900676},
      {12, 0.87439613526570048},
      {16, 0.81909547738693467},
  };
  for (const auto& [ss, expected_plain] : plain_dice) {
    CAPTURE(ss);
    const auto low = simulate_low_res(disk.truth_onehot, ss);
    const auto plain = refine_upsampled(low, disk.guide, RefinePipelineConfig{ss, GadParams{0.002, 0.24, 0}});
    const auto refined = refine_upsampled(low, disk.guide, RefinePipelineConfig{ss, GadParams{0.002, 0.24, 1000}});
    const double a = dice(confusion(plain.labels, disk.truth, band), 1);
    const double b = dice(confusion(refined.labels, disk.truth, band), 1);
    CHECK(a == doctest::Approx(expected_plain).epsilon(1e-15));
    CHECK(b == 1.0);
    CHECK(global_accuracy(confusion(refined.labels, disk.truth, band)) == 1.0);
    if (ss >= 4) CHECK(b > a);

    // Pixels far from the boundary already have the right label and keep it.
    const auto far = boundary_mask(disk.truth, 12);
    for (std::size_t i = 0; i < far.size(); ++i)
      if (far.ids()[i] == 0) {
        CHECK(plain.labels.ids()[i] == disk.truth.ids()[i]);
        CHECK(refined.labels.ids()[i] == disk.truth.ids()[i]);
      }
  }
}
