#pragma once

#include <span>
#include <vector>

#include "gad/field.hpp"

namespace gad {

/// Diffusion hyperparameters.
///
/// `k` is the contrast scale and lives in the same units as the guide
/// values: edges whose (channel-averaged) difference equals `k` get a
/// coefficient of 0.5. `lambda` is the explicit-Euler step, which must stay
/// in (0, 0.25] for the 4-neighbourhood scheme to be stable.
struct GadParams {
  double k = 0.002;
  double lambda = 0.24;
  int iterations = 1000;
  /// Stop once the largest per-pixel update of the target drops below this
  /// value. 0 disables the check so the iteration count is exact.
  double early_exit_tolerance = 0.0;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;

  /// Guides normalised to [0,1].
  static GadParams unit_range() { return {0.002, 0.24, 1000, 0.0}; }
  /// Guides in 0..255 intensity units.
  static GadParams byte_range() { return {5.0, 0.24, 1000, 0.0}; }
};

inline constexpr double kMaxStableLambda = 0.25;

/// Per-edge conductivities in [0,1], laid out like EdgeField.
struct CoefficientField {
  ScalarField east;
  ScalarField south;

  int height() const noexcept { return east.height(); }
  int width() const noexcept { return east.width(); }
};

enum class Kernel {
  Reference,  ///< straightforward per-pixel loops, used as the test oracle
  Optimized,  ///< row-streamed, fused, OpenMP-parallel over rows
};

/// 1 / (1 + (grad_mag / k)^2)
double coeff_scalar(double grad_mag, double k);

/// Coefficients from a C-channel guide: s = sum_C |diff_C| / (C k), c = 1/(1+s^2).
CoefficientField coeff_rgb(const MultiChannelField& guide, double k);

/// Elementwise minimum of coeff_rgb over all guides.
CoefficientField coeff_multi_guide(std::span<const MultiChannelField> guides, double k);

/// One explicit Euler step of div(c grad f) with zero-flux borders.
ScalarField diffusion_step(const ScalarField& f, const CoefficientField& c, double lambda,
                           Kernel kernel = Kernel::Optimized);

/// Classic self-guided Perona-Malik: coefficients are recomputed from the
/// current field before every step.
ScalarField anisotropic_diffuse(const ScalarField& f, const GadParams& params,
                                Kernel kernel = Kernel::Optimized);

/// Multi-channel self-guided variant: all channels share coefficients
/// computed from the whole stack.
MultiChannelField anisotropic_diffuse(const MultiChannelField& f, const GadParams& params,
                                      Kernel kernel = Kernel::Optimized);

/// Guided anisotropic diffusion.
///
/// Every iteration computes each guide's own coefficients, steps the guide
/// with them, and steps every target channel with the per-edge minimum over
/// the guides. The evolving guides are private copies; the arguments are
/// left untouched.
///
/// Throws InvalidArgument for an empty guide list or bad params, ShapeError
/// when the rasters disagree in size.
MultiChannelField gad_filter(const MultiChannelField& target,
                             std::span<const MultiChannelField> guides, const GadParams& params,
                             Kernel kernel = Kernel::Optimized);

inline MultiChannelField gad_filter(const MultiChannelField& target,
                                    const std::vector<MultiChannelField>& guides,
                                    const GadParams& params, Kernel kernel = Kernel::Optimized) {
  return gad_filter(target, std::span<const MultiChannelField>(guides), params, kernel);
}

}  // namespace gad
