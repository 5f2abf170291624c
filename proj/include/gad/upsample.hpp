#pragma once

#include "gad/diffusion.hpp"
#include "gad/field.hpp"
#include "gad/labels.hpp"

namespace gad {

struct RefinePipelineConfig {
  int subsampling = 1;  ///< ss: ratio between guide and probability resolution
  GadParams gad = GadParams::unit_range();

  void validate() const;
};

struct RefineResult {
  MultiChannelField probs;  ///< refined per-class probabilities at guide resolution
  LabelMap labels;          ///< argmax, lowest class id wins ties
};

/// Per-pixel argmax over channels; ties go to the lowest class id. The
/// returned map has num_classes = max(2, C) and ignore id = that count.
LabelMap argmax_labels(const MultiChannelField& probs);

/// Upsample low-resolution class probabilities to the guide's resolution,
/// filter them with the guide and take the argmax.
///
/// `probs_low` must be ceil(H/ss) x ceil(W/ss) for an H x W guide (the
/// upsampled grid is cropped to H x W) and sum to 1 per pixel within 1e-5.
RefineResult refine_upsampled(const MultiChannelField& probs_low, const MultiChannelField& guide_high,
                              const RefinePipelineConfig& config);

/// Stand-in for a low-resolution segmenter: box-average a one-hot stack by
/// `ss` and renormalise each pixel.
MultiChannelField simulate_low_res(const MultiChannelField& truth_onehot, int ss);

/// One channel per class, 1 where `labels` has that class. Ignore pixels get
/// all-zero columns.
MultiChannelField one_hot(const LabelMap& labels);

}  // namespace gad
