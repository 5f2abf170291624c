#pragma once

#include <span>
#include <vector>

#include "gad/diffusion.hpp"
#include "gad/field.hpp"

namespace gad {

/// Raw spatial attention logits a(i,j). Weights are sigmoid(a) in (0,1).
class AttentionGrid {
public:
  AttentionGrid() = default;
  explicit AttentionGrid(ScalarField logits) : logits_(std::move(logits)) {}

  /// Fresh grid: all logits 0, all weights 0.5.
  static AttentionGrid zeros(int rows, int cols) { return AttentionGrid(ScalarField(rows, cols)); }

  /// Inverse of weights(); values are clamped to (eps, 1 - eps) first.
  static AttentionGrid from_weights(const ScalarField& weights, double eps = 1e-6);

  int rows() const noexcept { return logits_.height(); }
  int cols() const noexcept { return logits_.width(); }
  const ScalarField& logits() const noexcept { return logits_; }
  ScalarField& logits() noexcept { return logits_; }

  ScalarField weights() const;

private:
  ScalarField logits_;
};

inline constexpr double kAttentionClampEps = 1e-6;

/// f(x)_{c,i,j} = (M N / sum sigma) * x_{c,i,j} * sigma(a_{i,j}).
///
/// The normaliser makes a fresh grid the identity map and makes the spatial
/// mean of f the sigma-weighted mean of x.
MultiChannelField attention_forward(const MultiChannelField& x, const AttentionGrid& a);

/// Spatial mean per channel.
std::vector<double> global_average_pool(const MultiChannelField& x);

struct AttentionGradients {
  MultiChannelField grad_x;
  ScalarField grad_logits;
};

/// Exact gradients of attention_forward given dL/df. Includes the dependence
/// of the normaliser on every logit.
AttentionGradients attention_backward(const MultiChannelField& x, const AttentionGrid& a,
                                      const MultiChannelField& upstream);

/// Adapts learned weights to image content: upsample the weights to guide
/// resolution, run gad_filter with the guides, box-average back, clamp and
/// map back to logits. Guide sizes must be an integer multiple of the grid.
/// With zero iterations the resampling is skipped.
AttentionGrid sharpen_attention(const AttentionGrid& a, std::span<const MultiChannelField> guides,
                                const GadParams& params, double eps = kAttentionClampEps);

}  // namespace gad
