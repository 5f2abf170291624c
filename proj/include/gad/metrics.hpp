#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gad/labels.hpp"

namespace gad {

/// One-vs-rest tallies per class over the evaluated pixels.
struct ConfusionCounts {
  struct Tally {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
  };

  std::vector<Tally> per_class;  ///< indexed by class id
  std::uint64_t evaluated_pixels = 0;
  std::uint64_t correct_pixels = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& other);
};

/// Tallies over pixels whose truth label is not the ignore id and, when
/// `eval_mask` is given, whose mask value is non-zero.
ConfusionCounts confusion(const LabelMap& pred, const LabelMap& truth,
                          const std::optional<LabelMap>& eval_mask = std::nullopt);

/// 2TP / (2TP + FP + FN). Throws UndefinedMetric when the denominator is 0.
double dice(const ConfusionCounts& counts, int class_id);

/// Fraction of evaluated pixels labelled correctly.
double global_accuracy(const ConfusionCounts& counts);

/// 1 where a pixel with a different label lies within Chebyshev distance
/// `radius`, else 0.
LabelMap boundary_mask(const LabelMap& truth, int radius);

}  // namespace gad
