#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gad/diffusion.hpp"
#include "gad/field.hpp"

namespace gad {

inline constexpr int kDefaultIgnoreId = 2;

/// H x W grid of class ids. Every id is < num_classes or equal to ignore_id,
/// and ignore_id never names a semantic class.
class LabelMap {
public:
  LabelMap() = default;
  LabelMap(int height, int width, int num_classes = 2, int ignore_id = kDefaultIgnoreId,
           std::uint8_t fill = 0);
  LabelMap(int height, int width, std::vector<std::uint8_t> ids, int num_classes = 2,
           int ignore_id = kDefaultIgnoreId);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int num_classes() const noexcept { return num_classes_; }
  int ignore_id() const noexcept { return ignore_id_; }
  std::size_t size() const noexcept { return ids_.size(); }

  std::uint8_t operator()(int row, int col) const noexcept { return ids_[index(row, col)]; }
  /// Unchecked write; call validate() afterwards if ids come from outside.
  std::uint8_t& operator()(int row, int col) noexcept { return ids_[index(row, col)]; }

  std::span<const std::uint8_t> ids() const noexcept { return ids_; }
  std::span<std::uint8_t> ids() noexcept { return ids_; }

  bool is_ignore(std::uint8_t id) const noexcept { return id == ignore_id_; }
  bool same_shape(const LabelMap& o) const noexcept {
    return height_ == o.height_ && width_ == o.width_;
  }

  /// Throws DomainError if any id is neither semantic nor the ignore id.
  void validate() const;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int height_ = 0;
  int width_ = 0;
  int num_classes_ = 2;
  int ignore_id_ = kDefaultIgnoreId;
  std::vector<std::uint8_t> ids_;
};

/// How disagreements between the original labels and a cleaned prediction
/// are resolved. Agreeing pixels always keep their label.
enum class MergeStrategy {
  Intersection,            ///< change only where both say change
  IgnoreFalseNegatives,    ///< original=1, pred=0 -> ignore; original=0, pred=1 -> 0
  IgnoreAllDisagreements,  ///< every disagreement -> ignore
};

/// CLI spelling: intersection, ignore-fn, ignore-all.
std::string_view to_string(MergeStrategy s);
/// Throws InvalidArgument for unknown names.
MergeStrategy parse_merge_strategy(std::string_view name);

struct ClassWeights {
  std::vector<double> weights;  ///< indexed by semantic class id
  int ignore_id = kDefaultIgnoreId;

  /// Weight for any id; the ignore class gets 0.
  double operator()(int id) const;
};

/// id = 1 where prob > threshold, else 0.
LabelMap binarize(const ScalarField& prob, double threshold = 0.5);

LabelMap merge(const LabelMap& original, const LabelMap& prediction, MergeStrategy strategy);

/// weight_c = total_non_ignore / (num_classes * count_c). Throws
/// MissingClassError naming every semantic class with no pixels.
ClassWeights class_weights(std::span<const LabelMap> maps);

/// One cleansing pass: filter `prob` with the guides, threshold, and merge
/// with the original labels. `original` must always be the initial ground
/// truth, never a previously merged map.
LabelMap cleanse(const LabelMap& original, const ScalarField& prob,
                 std::span<const MultiChannelField> guides, const GadParams& params,
                 MergeStrategy strategy, double threshold = 0.5);

}  // namespace gad
