#pragma once

#include <cstdint>

#include "gad/field.hpp"
#include "gad/labels.hpp"

namespace gad::synth {

/// Bright square on a dark background with over-extended ("parcel") labels:
/// the noisy labels are the true square dilated by `dilation` pixels.
struct SquareScenario {
  MultiChannelField guide;  ///< 1 channel, square = contrast, background = 0, plus noise
  LabelMap truth;           ///< true square
  LabelMap noisy_labels;    ///< dilated square
  ScalarField noisy_prob;   ///< noisy labels as a 0/1 probability map
};

struct SquareOptions {
  int size = 64;
  int side = 24;
  int dilation = 6;
  double contrast = 1.0;
  double noise_sigma = 0.01;
  std::uint64_t seed = 1;
};

SquareScenario make_square(const SquareOptions& opts = {});

/// Sharp disk on a dark background, for the upsampling pipeline.
struct DiskScenario {
  MultiChannelField guide;         ///< 1 channel
  LabelMap truth;                  ///< 0 = background, 1 = disk
  MultiChannelField truth_onehot;  ///< 2 channels
};

struct DiskOptions {
  int size = 128;
  double radius = 40.0;
  double center_jitter = 4.0;  ///< centre offset drawn uniformly from [-j, j] per axis
  double contrast = 1.0;
  double noise_sigma = 0.0005;
  std::uint64_t seed = 1;
};

DiskScenario make_disk(const DiskOptions& opts = {});

/// Chebyshev dilation of the label-1 region by `radius` pixels.
LabelMap dilate(const LabelMap& mask, int radius);

}  // namespace gad::synth
