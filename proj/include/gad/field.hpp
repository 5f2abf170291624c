#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gad {

/// H x W grid of finite doubles, row-major.
class ScalarField {
public:
  ScalarField() = default;
  ScalarField(int height, int width, double fill = 0.0);

  /// Takes ownership of `values`; throws InvalidArgument on a size mismatch
  /// and DomainError on a non-finite element.
  ScalarField(int height, int width, std::vector<double> values);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(int row, int col) const noexcept { return data_[index(row, col)]; }
  double& operator()(int row, int col) noexcept { return data_[index(row, col)]; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> row(int r) const noexcept {
    return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<double> row(int r) noexcept {
    return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)};
  }

  bool same_shape(const ScalarField& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  double min() const;
  double max() const;
  double sum() const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// C >= 1 planes of identical dimensions.
class MultiChannelField {
public:
  MultiChannelField() = default;
  MultiChannelField(int channels, int height, int width, double fill = 0.0);
  explicit MultiChannelField(std::vector<ScalarField> planes);
  explicit MultiChannelField(ScalarField plane);

  int channels() const noexcept { return static_cast<int>(planes_.size()); }
  int height() const noexcept { return planes_.empty() ? 0 : planes_.front().height(); }
  int width() const noexcept { return planes_.empty() ? 0 : planes_.front().width(); }

  const ScalarField& operator[](int c) const noexcept { return planes_[c]; }
  ScalarField& operator[](int c) noexcept { return planes_[c]; }

  const std::vector<ScalarField>& planes() const noexcept { return planes_; }
  std::vector<ScalarField>& planes() noexcept { return planes_; }

  bool same_spatial_shape(const MultiChannelField& other) const noexcept {
    return height() == other.height() && width() == other.width();
  }

  friend bool operator==(const MultiChannelField&, const MultiChannelField&) = default;

private:
  std::vector<ScalarField> planes_;
};

/// Per-edge values on the 4-neighbourhood. `east(r,c)` belongs to the edge
/// between (r,c) and (r,c+1); `south(r,c)` to the edge between (r,c) and
/// (r+1,c). Edges that would leave the raster are stored as 0.
struct EdgeField {
  ScalarField east;
  ScalarField south;

  int height() const noexcept { return east.height(); }
  int width() const noexcept { return east.width(); }
};

/// Forward differences with zero-flux borders.
EdgeField gradient_edges(const ScalarField& f);

/// Bilinear interpolation, align-corners=false. Output is (H*factor) x (W*factor).
MultiChannelField bilinear_upsample(const MultiChannelField& f, int factor);

/// Same sampling as bilinear_upsample, cropped to `out_height` x `out_width`
/// (both must be <= the full upsampled size).
MultiChannelField bilinear_upsample(const MultiChannelField& f, int factor, int out_height,
                                    int out_width);

/// Mean over factor x factor blocks. Non-divisible sizes are padded by
/// replicating the last row/column, so the output is ceil(H/factor) x ceil(W/factor).
MultiChannelField box_downsample(const MultiChannelField& f, int factor);

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* what);
void require_same_shape(const MultiChannelField& a, const MultiChannelField& b, const char* what);

}  // namespace gad
