#include "gad/labels.hpp"

#include <string>

#include "gad/errors.hpp"

namespace gad {

namespace {

constexpr double kProbTolerance = 1e-6;

void check_label_config(int height, int width, int num_classes, int ignore_id) {
  if (height < 0 || width < 0) throw InvalidArgument("label map dimensions must be non-negative");
  if (num_classes < 1 || num_classes > 255)
    throw InvalidArgument("num_classes must be in [1, 255], got " + std::to_string(num_classes));
  if (ignore_id < 0 || ignore_id > 255)
    throw InvalidArgument("ignore id must be in [0, 255], got " + std::to_string(ignore_id));
  if (ignore_id < num_classes)
    throw InvalidArgument("ignore id " + std::to_string(ignore_id) +
                          " collides with a semantic class (num_classes=" +
                          std::to_string(num_classes) + ")");
}

void require_binary(const LabelMap& m, const char* which) {
  for (auto id : m.ids())
    if (id > 1)
      throw DomainError(std::string(which) + " labels must be binary {0,1}, found " +
                        std::to_string(id));
}

}  // namespace

LabelMap::LabelMap(int height, int width, int num_classes, int ignore_id, std::uint8_t fill)
    : height_(height), width_(width), num_classes_(num_classes), ignore_id_(ignore_id) {
  check_label_config(height, width, num_classes, ignore_id);
  ids_.assign(static_cast<std::size_t>(height) * width, fill);
  validate();
}

LabelMap::LabelMap(int height, int width, std::vector<std::uint8_t> ids, int num_classes,
                   int ignore_id)
    : height_(height),
      width_(width),
      num_classes_(num_classes),
      ignore_id_(ignore_id),
      ids_(std::move(ids)) {
  check_label_config(height, width, num_classes, ignore_id);
  if (ids_.size() != static_cast<std::size_t>(height) * width)
    throw InvalidArgument("label data length does not match dimensions");
  validate();
}

void LabelMap::validate() const {
  for (auto id : ids_)
    if (id >= num_classes_ && id != ignore_id_)
      throw DomainError("label id " + std::to_string(id) + " is neither a class below " +
                        std::to_string(num_classes_) + " nor the ignore id " +
                        std::to_string(ignore_id_));
}

std::string_view to_string(MergeStrategy s) {
  switch (s) {
    case MergeStrategy::Intersection:
      return "intersection";
    case MergeStrategy::IgnoreFalseNegatives:
      return "ignore-fn";
    case MergeStrategy::IgnoreAllDisagreements:
      return "ignore-all";
  }
  return "?";
}

MergeStrategy parse_merge_strategy(std::string_view name) {
  if (name == "intersection") return MergeStrategy::Intersection;
  if (name == "ignore-fn") return MergeStrategy::IgnoreFalseNegatives;
  if (name == "ignore-all") return MergeStrategy::IgnoreAllDisagreements;
  throw InvalidArgument("unknown merge strategy '" + std::string(name) +
                        "' (expected intersection, ignore-fn or ignore-all)");
}

double ClassWeights::operator()(int id) const {
  if (id == ignore_id) return 0.0;
  if (id < 0 || id >= static_cast<int>(weights.size()))
    throw InvalidArgument("no weight for class id " + std::to_string(id));
  return weights[id];
}

LabelMap binarize(const ScalarField& prob, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw InvalidArgument("threshold must lie in (0,1), got " + std::to_string(threshold));
  LabelMap out(prob.height(), prob.width());
  auto dst = out.ids();
  const auto src = prob.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double p = src[i];
    if (p < -kProbTolerance || p > 1.0 + kProbTolerance)
      throw DomainError("probability " + std::to_string(p) + " outside [0,1]");
    dst[i] = p > threshold ? 1 : 0;
  }
  return out;
}

LabelMap merge(const LabelMap& original, const LabelMap& prediction, MergeStrategy strategy) {
  if (!original.same_shape(prediction))
    throw ShapeError("original and prediction label maps differ in size");
  require_binary(original, "original");
  require_binary(prediction, "prediction");

  // Indexed [pred][orig], rows and columns as in the published tables.
  std::uint8_t table[2][2];
  const auto ign = static_cast<std::uint8_t>(original.ignore_id());
  switch (strategy) {
    case MergeStrategy::Intersection:
      table[0][0] = 0; table[0][1] = 0;
      table[1][0] = 0; table[1][1] = 1;
      break;
    case MergeStrategy::IgnoreFalseNegatives:
      table[0][0] = 0; table[0][1] = ign;
      table[1][0] = 0; table[1][1] = 1;
      break;
    case MergeStrategy::IgnoreAllDisagreements:
      table[0][0] = 0; table[0][1] = ign;
      table[1][0] = ign; table[1][1] = 1;
      break;
  }

  LabelMap out(original.height(), original.width(), original.num_classes(), original.ignore_id());
  auto dst = out.ids();
  const auto o = original.ids();
  const auto p = prediction.ids();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = table[p[i]][o[i]];
  return out;
}

ClassWeights class_weights(std::span<const LabelMap> maps) {
  if (maps.empty()) throw InvalidArgument("class_weights needs at least one label map");
  const int nc = maps.front().num_classes();
  const int ign = maps.front().ignore_id();
  std::vector<std::uint64_t> counts(nc, 0);
  for (const auto& m : maps) {
    if (m.num_classes() != nc || m.ignore_id() != ign)
      throw InvalidArgument("label maps disagree on class configuration");
    for (auto id : m.ids())
      if (id != ign) ++counts[id];
  }

  std::vector<int> missing;
  std::uint64_t total = 0;
  for (int c = 0; c < nc; ++c) {
    if (counts[c] == 0) missing.push_back(c);
    total += counts[c];
  }
  if (!missing.empty()) {
    std::string msg = "no pixels for class";
    for (int c : missing) msg += " " + std::to_string(c);
    throw MissingClassError(msg, missing);
  }

  ClassWeights w;
  w.ignore_id = ign;
  w.weights.resize(nc);
  for (int c = 0; c < nc; ++c)
    w.weights[c] = static_cast<double>(total) / (static_cast<double>(nc) * counts[c]);
  return w;
}

LabelMap cleanse(const LabelMap& original, const ScalarField& prob,
                 std::span<const MultiChannelField> guides, const GadParams& params,
                 MergeStrategy strategy, double threshold) {
  if (original.height() != prob.height() || original.width() != prob.width())
    throw ShapeError("original labels and probability map differ in size");
  const auto filtered = gad_filter(MultiChannelField(prob), guides, params);
  return merge(original, binarize(filtered[0], threshold), strategy);
}

}  // namespace gad
