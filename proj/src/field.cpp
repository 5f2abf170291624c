#include "gad/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gad/errors.hpp"

namespace gad {

namespace {

void check_dims(int height, int width) {
  if (height < 0 || width < 0)
    throw InvalidArgument("field dimensions must be non-negative");
}

std::string shape_str(int h, int w) { return std::to_string(h) + "x" + std::to_string(w); }

}  // namespace

ScalarField::ScalarField(int height, int width, double fill)
    : height_(height), width_(width) {
  check_dims(height, width);
  if (!std::isfinite(fill)) throw DomainError("field fill value must be finite");
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

ScalarField::ScalarField(int height, int width, std::vector<double> values)
    : height_(height), width_(width), data_(std::move(values)) {
  check_dims(height, width);
  if (data_.size() != static_cast<std::size_t>(height) * width)
    throw InvalidArgument("field data length " + std::to_string(data_.size()) +
                          " does not match " + shape_str(height, width));
  for (double v : data_)
    if (!std::isfinite(v)) throw DomainError("field values must be finite");
}

double ScalarField::min() const {
  if (data_.empty()) throw InvalidArgument("min of an empty field");
  return *std::min_element(data_.begin(), data_.end());
}

double ScalarField::max() const {
  if (data_.empty()) throw InvalidArgument("max of an empty field");
  return *std::max_element(data_.begin(), data_.end());
}

double ScalarField::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

MultiChannelField::MultiChannelField(int channels, int height, int width, double fill) {
  if (channels < 1) throw InvalidArgument("a multi-channel field needs at least one channel");
  planes_.assign(channels, ScalarField(height, width, fill));
}

MultiChannelField::MultiChannelField(std::vector<ScalarField> planes) : planes_(std::move(planes)) {
  if (planes_.empty()) throw InvalidArgument("a multi-channel field needs at least one channel");
  for (const auto& p : planes_)
    if (!p.same_shape(planes_.front()))
      throw ShapeError("channel planes differ in size: " +
                       shape_str(planes_.front().height(), planes_.front().width()) + " vs " +
                       shape_str(p.height(), p.width()));
}

MultiChannelField::MultiChannelField(ScalarField plane) { planes_.push_back(std::move(plane)); }

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(what) + ": " + shape_str(a.height(), a.width()) + " vs " +
                     shape_str(b.height(), b.width()));
}

void require_same_shape(const MultiChannelField& a, const MultiChannelField& b, const char* what) {
  if (!a.same_spatial_shape(b))
    throw ShapeError(std::string(what) + ": " + shape_str(a.height(), a.width()) + " vs " +
                     shape_str(b.height(), b.width()));
}

EdgeField gradient_edges(const ScalarField& f) {
  const int h = f.height();
  const int w = f.width();
  EdgeField e{ScalarField(h, w), ScalarField(h, w)};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c + 1 < w; ++c) e.east(r, c) = f(r, c + 1) - f(r, c);
    if (r + 1 < h)
      for (int c = 0; c < w; ++c) e.south(r, c) = f(r + 1, c) - f(r, c);
  }
  return e;
}

namespace {

struct Tap {
  int lo;
  int hi;
  double frac;  // weight of `hi`
};

// align-corners=false source coordinate, clamped at the borders
std::vector<Tap> bilinear_taps(int in_size, int factor, int out_size) {
  std::vector<Tap> taps(out_size);
  for (int o = 0; o < out_size; ++o) {
    double src = (o + 0.5) / factor - 0.5;
    if (src < 0.0) src = 0.0;
    int lo = static_cast<int>(std::floor(src));
    if (lo > in_size - 1) lo = in_size - 1;
    const int hi = std::min(lo + 1, in_size - 1);
    taps[o] = {lo, hi, hi == lo ? 0.0 : src - lo};
  }
  return taps;
}

}  // namespace

MultiChannelField bilinear_upsample(const MultiChannelField& f, int factor) {
  if (factor < 1) throw InvalidArgument("upsampling factor must be >= 1, got " + std::to_string(factor));
  return bilinear_upsample(f, factor, f.height() * factor, f.width() * factor);
}

MultiChannelField bilinear_upsample(const MultiChannelField& f, int factor, int out_height,
                                    int out_width) {
  if (factor < 1) throw InvalidArgument("upsampling factor must be >= 1, got " + std::to_string(factor));
  if (out_height > f.height() * factor || out_width > f.width() * factor || out_height < 0 ||
      out_width < 0)
    throw ShapeError("requested output " + shape_str(out_height, out_width) +
                     " exceeds upsampled size " +
                     shape_str(f.height() * factor, f.width() * factor));
  if (factor == 1 && out_height == f.height() && out_width == f.width()) return f;

  const auto rows = bilinear_taps(f.height(), factor, out_height);
  const auto cols = bilinear_taps(f.width(), factor, out_width);
  std::vector<ScalarField> planes;
  planes.reserve(f.channels());
  for (const auto& in : f.planes()) {
    ScalarField out(out_height, out_width);
    for (int r = 0; r < out_height; ++r) {
      const auto& tr = rows[r];
      const auto top = in.row(tr.lo);
      const auto bottom = in.row(tr.hi);
      auto dst = out.row(r);
      for (int c = 0; c < out_width; ++c) {
        const auto& tc = cols[c];
        const double t = top[tc.lo] + tc.frac * (top[tc.hi] - top[tc.lo]);
        const double b = bottom[tc.lo] + tc.frac * (bottom[tc.hi] - bottom[tc.lo]);
        dst[c] = t + tr.frac * (b - t);
      }
    }
    planes.push_back(std::move(out));
  }
  return MultiChannelField(std::move(planes));
}

MultiChannelField box_downsample(const MultiChannelField& f, int factor) {
  if (factor < 1) throw InvalidArgument("downsampling factor must be >= 1, got " + std::to_string(factor));
  if (factor == 1) return f;
  const int h = f.height();
  const int w = f.width();
  const int oh = (h + factor - 1) / factor;
  const int ow = (w + factor - 1) / factor;
  const double inv_area = 1.0 / (static_cast<double>(factor) * factor);

  std::vector<ScalarField> planes;
  planes.reserve(f.channels());
  for (const auto& in : f.planes()) {
    ScalarField out(oh, ow);
    for (int r = 0; r < oh; ++r)
      for (int c = 0; c < ow; ++c) {
        double acc = 0.0;
        for (int dr = 0; dr < factor; ++dr) {
          const int sr = std::min(r * factor + dr, h - 1);
          for (int dc = 0; dc < factor; ++dc) acc += in(sr, std::min(c * factor + dc, w - 1));
        }
        out(r, c) = acc * inv_area;
      }
    planes.push_back(std::move(out));
  }
  return MultiChannelField(std::move(planes));
}

}  // namespace gad
