#include "gad/upsample.hpp"

#include <cmath>
#include <string>

#include "gad/errors.hpp"

namespace gad {

namespace {

constexpr double kInputSumTolerance = 1e-5;

void check_normalized(const MultiChannelField& probs, double tol) {
  const std::size_t n = probs[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& p : probs.planes()) {
      const double v = p.values()[i];
      if (v < -tol) throw DomainError("negative class probability " + std::to_string(v));
      s += v;
    }
    if (std::abs(s - 1.0) > tol)
      throw DomainError("class probabilities sum to " + std::to_string(s) + " at pixel " +
                        std::to_string(i) + ", expected 1");
  }
}

void renormalize(MultiChannelField& probs) {
  const std::size_t n = probs[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& p : probs.planes()) s += p.values()[i];
    if (s > 0.0)
      for (auto& p : probs.planes()) p.values()[i] /= s;
  }
}

}  // namespace

void RefinePipelineConfig::validate() const {
  if (subsampling < 1)
    throw InvalidArgument("subsampling factor must be >= 1, got " + std::to_string(subsampling));
  gad.validate();
}

LabelMap argmax_labels(const MultiChannelField& probs) {
  const int nc = std::max(2, probs.channels());
  LabelMap out(probs.height(), probs.width(), nc, nc);
  auto dst = out.ids();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    int best = 0;
    double best_v = probs[0].values()[i];
    for (int c = 1; c < probs.channels(); ++c) {
      const double v = probs[c].values()[i];
      if (v > best_v) {
        best = c;
        best_v = v;
      }
    }
    dst[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

RefineResult refine_upsampled(const MultiChannelField& probs_low, const MultiChannelField& guide_high,
                              const RefinePipelineConfig& config) {
  config.validate();
  if (probs_low.channels() > 255) throw InvalidArgument("at most 255 classes are supported");
  const int ss = config.subsampling;
  const int h = guide_high.height();
  const int w = guide_high.width();
  if (probs_low.height() != (h + ss - 1) / ss || probs_low.width() != (w + ss - 1) / ss)
    throw ShapeError("probabilities are " + std::to_string(probs_low.height()) + "x" +
                     std::to_string(probs_low.width()) + " but a " + std::to_string(h) + "x" +
                     std::to_string(w) + " guide at ss=" + std::to_string(ss) + " needs " +
                     std::to_string((h + ss - 1) / ss) + "x" + std::to_string((w + ss - 1) / ss));
  check_normalized(probs_low, kInputSumTolerance);

  MultiChannelField up = bilinear_upsample(probs_low, ss, h, w);
  renormalize(up);
  const MultiChannelField guides[] = {guide_high};
  MultiChannelField refined = gad_filter(up, guides, config.gad);
  LabelMap labels = argmax_labels(refined);
  return {std::move(refined), std::move(labels)};
}

MultiChannelField simulate_low_res(const MultiChannelField& truth_onehot, int ss) {
  MultiChannelField low = box_downsample(truth_onehot, ss);
  renormalize(low);
  return low;
}

MultiChannelField one_hot(const LabelMap& labels) {
  MultiChannelField out(labels.num_classes(), labels.height(), labels.width());
  const auto ids = labels.ids();
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (!labels.is_ignore(ids[i])) out[ids[i]].values()[i] = 1.0;
  return out;
}

}  // namespace gad
