#include "gad/metrics.hpp"

#include <algorithm>
#include <string>

#include "gad/errors.hpp"

namespace gad {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  if (per_class.size() < other.per_class.size()) per_class.resize(other.per_class.size());
  for (std::size_t c = 0; c < other.per_class.size(); ++c) {
    per_class[c].tp += other.per_class[c].tp;
    per_class[c].fp += other.per_class[c].fp;
    per_class[c].fn += other.per_class[c].fn;
    per_class[c].tn += other.per_class[c].tn;
  }
  evaluated_pixels += other.evaluated_pixels;
  correct_pixels += other.correct_pixels;
  return *this;
}

ConfusionCounts confusion(const LabelMap& pred, const LabelMap& truth,
                          const std::optional<LabelMap>& eval_mask) {
  if (!pred.same_shape(truth)) throw ShapeError("prediction and truth differ in size");
  if (eval_mask && !eval_mask->same_shape(truth))
    throw ShapeError("evaluation mask and truth differ in size");

  const int nc = truth.num_classes();
  ConfusionCounts out;
  out.per_class.resize(nc);
  const auto p = pred.ids();
  const auto t = truth.ids();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (truth.is_ignore(t[i])) continue;
    if (eval_mask && eval_mask->ids()[i] == 0) continue;
    ++out.evaluated_pixels;
    if (p[i] == t[i]) ++out.correct_pixels;
    for (int c = 0; c < nc; ++c) {
      const bool is_pred = p[i] == c;
      const bool is_true = t[i] == c;
      auto& tally = out.per_class[c];
      if (is_pred && is_true)
        ++tally.tp;
      else if (is_pred)
        ++tally.fp;
      else if (is_true)
        ++tally.fn;
      else
        ++tally.tn;
    }
  }
  return out;
}

double dice(const ConfusionCounts& counts, int class_id) {
  if (counts.evaluated_pixels == 0) throw UndefinedMetric("empty evaluation set");
  if (class_id < 0 || class_id >= static_cast<int>(counts.per_class.size()))
    throw InvalidArgument("no tallies for class " + std::to_string(class_id));
  const auto& t = counts.per_class[class_id];
  const std::uint64_t denom = 2 * t.tp + t.fp + t.fn;
  if (denom == 0)
    throw UndefinedMetric("Dice undefined for class " + std::to_string(class_id) +
                          ": no predicted or true pixels");
  return static_cast<double>(2 * t.tp) / static_cast<double>(denom);
}

double global_accuracy(const ConfusionCounts& counts) {
  if (counts.evaluated_pixels == 0) throw UndefinedMetric("empty evaluation set");
  return static_cast<double>(counts.correct_pixels) / static_cast<double>(counts.evaluated_pixels);
}

LabelMap boundary_mask(const LabelMap& truth, int radius) {
  if (radius < 1) throw InvalidArgument("boundary radius must be >= 1");
  const int h = truth.height();
  const int w = truth.width();

  // Separable sliding min/max over the (2r+1)^2 window; a differing label
  // exists iff the window min differs from its max.
  std::vector<std::uint8_t> rmin(truth.size()), rmax(truth.size());
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      std::uint8_t lo = 255, hi = 0;
      for (int cc = std::max(0, c - radius); cc <= std::min(w - 1, c + radius); ++cc) {
        lo = std::min(lo, truth(r, cc));
        hi = std::max(hi, truth(r, cc));
      }
      rmin[static_cast<std::size_t>(r) * w + c] = lo;
      rmax[static_cast<std::size_t>(r) * w + c] = hi;
    }

  LabelMap out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      std::uint8_t lo = 255, hi = 0;
      for (int rr = std::max(0, r - radius); rr <= std::min(h - 1, r + radius); ++rr) {
        const std::size_t i = static_cast<std::size_t>(rr) * w + c;
        lo = std::min(lo, rmin[i]);
        hi = std::max(hi, rmax[i]);
      }
      out(r, c) = lo != hi ? 1 : 0;
    }
  return out;
}

}  // namespace gad
