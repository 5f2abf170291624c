#include "gad/synth.hpp"

#include <algorithm>
#include <random>

#include "gad/errors.hpp"
#include "gad/upsample.hpp"

namespace gad::synth {

namespace {

void add_noise(ScalarField& f, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : f.values()) v += noise(rng);
}

}  // namespace

LabelMap dilate(const LabelMap& mask, int radius) {
  if (radius < 0) throw InvalidArgument("dilation radius must be >= 0");
  LabelMap out = mask;
  const int h = mask.height();
  const int w = mask.width();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (mask(r, c) != 1) continue;
      for (int rr = std::max(0, r - radius); rr <= std::min(h - 1, r + radius); ++rr)
        for (int cc = std::max(0, c - radius); cc <= std::min(w - 1, c + radius); ++cc)
          out(rr, cc) = 1;
    }
  return out;
}

SquareScenario make_square(const SquareOptions& opts) {
  if (opts.size < 1 || opts.side < 1 || opts.side > opts.size)
    throw InvalidArgument("square must fit inside the raster");
  std::mt19937_64 rng(opts.seed);
  const int n = opts.size;
  const int lo = (n - opts.side) / 2;
  const int hi = lo + opts.side;

  ScalarField guide(n, n);
  LabelMap truth(n, n);
  for (int r = lo; r < hi; ++r)
    for (int c = lo; c < hi; ++c) {
      guide(r, c) = opts.contrast;
      truth(r, c) = 1;
    }
  add_noise(guide, opts.noise_sigma, rng);

  LabelMap noisy = dilate(truth, opts.dilation);
  ScalarField prob(n, n);
  for (std::size_t i = 0; i < prob.size(); ++i) prob.values()[i] = noisy.ids()[i];
  return {MultiChannelField(std::move(guide)), std::move(truth), std::move(noisy), std::move(prob)};
}

DiskScenario make_disk(const DiskOptions& opts) {
  if (opts.size < 1 || opts.radius <= 0.0) throw InvalidArgument("invalid disk scenario");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(-opts.center_jitter, opts.center_jitter);
  const int n = opts.size;
  const double cy = (n - 1) / 2.0 + jitter(rng);
  const double cx = (n - 1) / 2.0 + jitter(rng);
  const double r2 = opts.radius * opts.radius;

  ScalarField guide(n, n);
  LabelMap truth(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double dy = r - cy;
      const double dx = c - cx;
      if (dy * dy + dx * dx <= r2) {
        guide(r, c) = opts.contrast;
        truth(r, c) = 1;
      }
    }
  add_noise(guide, opts.noise_sigma, rng);
  MultiChannelField onehot = one_hot(truth);
  return {MultiChannelField(std::move(guide)), std::move(truth), std::move(onehot)};
}

}  // namespace gad::synth
