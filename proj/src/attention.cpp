#include "gad/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gad/errors.hpp"

namespace gad {

namespace {

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

void require_grid_match(const MultiChannelField& x, const AttentionGrid& a) {
  if (x.height() != a.rows() || x.width() != a.cols())
    throw ShapeError("feature map is " + std::to_string(x.height()) + "x" +
                     std::to_string(x.width()) + " but attention grid is " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

}  // namespace

AttentionGrid AttentionGrid::from_weights(const ScalarField& weights, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("clamp eps must lie in (0, 0.5)");
  ScalarField logits(weights.height(), weights.width());
  const auto src = weights.values();
  auto dst = logits.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double p = std::clamp(src[i], eps, 1.0 - eps);
    dst[i] = std::log(p / (1.0 - p));
  }
  return AttentionGrid(std::move(logits));
}

ScalarField AttentionGrid::weights() const {
  ScalarField w(rows(), cols());
  const auto src = logits_.values();
  auto dst = w.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = sigmoid(src[i]);
  return w;
}

MultiChannelField attention_forward(const MultiChannelField& x, const AttentionGrid& a) {
  require_grid_match(x, a);
  const ScalarField sig = a.weights();
  const double scale = static_cast<double>(sig.size()) / sig.sum();
  MultiChannelField out = x;
  for (auto& plane : out.planes()) {
    auto v = plane.values();
    const auto s = sig.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * v[i] * s[i];
  }
  return out;
}

std::vector<double> global_average_pool(const MultiChannelField& x) {
  if (x.height() * x.width() < 1) throw InvalidArgument("global average pool of an empty map");
  std::vector<double> out;
  out.reserve(x.channels());
  for (const auto& plane : x.planes()) out.push_back(plane.sum() / static_cast<double>(plane.size()));
  return out;
}

AttentionGradients attention_backward(const MultiChannelField& x, const AttentionGrid& a,
                                      const MultiChannelField& upstream) {
  require_grid_match(x, a);
  if (upstream.channels() != x.channels() || !upstream.same_spatial_shape(x))
    throw ShapeError("upstream gradient does not match the feature map");

  const ScalarField sig = a.weights();
  const auto s = sig.values();
  const double cells = static_cast<double>(sig.size());
  const double total = sig.sum();
  const double scale = cells / total;

  // f = scale * x * s, scale = MN / S, S = sum(s)
  // df/ds_kl = MN x_kl / S * [ij == kl] - MN x_ij s_ij / S^2
  std::vector<double> gx_dot(s.size(), 0.0);  // sum_c g * x per cell
  MultiChannelField grad_x = upstream;
  for (int c = 0; c < x.channels(); ++c) {
    const auto g = upstream[c].values();
    const auto xv = x[c].values();
    auto gx = grad_x[c].values();
    for (std::size_t i = 0; i < s.size(); ++i) {
      gx[i] = g[i] * scale * s[i];
      gx_dot[i] += g[i] * xv[i];
    }
  }
  double coupled = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) coupled += gx_dot[i] * s[i];
  coupled *= cells / (total * total);

  ScalarField grad_logits(sig.height(), sig.width());
  auto ga = grad_logits.values();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double grad_sigma = scale * gx_dot[i] - coupled;
    ga[i] = grad_sigma * s[i] * (1.0 - s[i]);
  }
  return {std::move(grad_x), std::move(grad_logits)};
}

AttentionGrid sharpen_attention(const AttentionGrid& a, std::span<const MultiChannelField> guides,
                                const GadParams& params, double eps) {
  params.validate();
  if (guides.empty()) throw InvalidArgument("at least one guide is required");
  for (const auto& g : guides) require_same_shape(guides.front(), g, "guide dimensions differ");
  if (params.iterations == 0) return AttentionGrid::from_weights(a.weights(), eps);

  const int gh = guides.front().height();
  const int gw = guides.front().width();
  if (a.rows() < 1 || a.cols() < 1 || gh % a.rows() != 0 || gw % a.cols() != 0 ||
      gh / a.rows() != gw / a.cols())
    throw ShapeError("guide size " + std::to_string(gh) + "x" + std::to_string(gw) +
                     " is not a uniform integer multiple of the attention grid " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  const int factor = gh / a.rows();

  const auto up = bilinear_upsample(MultiChannelField(a.weights()), factor);
  const auto filtered = gad_filter(up, guides, params);
  const auto down = box_downsample(filtered, factor);
  return AttentionGrid::from_weights(down[0], eps);
}

}  // namespace gad
