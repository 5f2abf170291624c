// NumPy bindings for the gad library. Scalar fields are (H, W) float64
// arrays, multi-channel fields are (C, H, W), label maps are (H, W) uint8.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <string>
#include <vector>

#include "gad/attention.hpp"
#include "gad/diffusion.hpp"
#include "gad/errors.hpp"
#include "gad/labels.hpp"
#include "gad/metrics.hpp"
#include "gad/parallel.hpp"
#include "gad/raster_io.hpp"
#include "gad/upsample.hpp"

namespace py = pybind11;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

gad::ScalarField to_scalar(const DoubleArray& a) {
  if (a.ndim() != 2) throw gad::ShapeError("expected a 2-D array (H, W)");
  const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  return gad::ScalarField(h, w, std::vector<double>(a.data(), a.data() + a.size()));
}

gad::MultiChannelField to_multi(const DoubleArray& a) {
  if (a.ndim() == 2) return gad::MultiChannelField(to_scalar(a));
  if (a.ndim() != 3) throw gad::ShapeError("expected a 2-D (H, W) or 3-D (C, H, W) array");
  const auto c = static_cast<int>(a.shape(0)), h = static_cast<int>(a.shape(1)), w = static_cast<int>(a.shape(2));
  if (c < 1) throw gad::ShapeError("expected at least one channel");
  std::vector<gad::ScalarField> planes;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int i = 0; i < c; ++i)
    planes.emplace_back(h, w, std::vector<double>(a.data() + i * plane, a.data() + (i + 1) * plane));
  return gad::MultiChannelField(std::move(planes));
}

std::vector<gad::MultiChannelField> to_guides(const std::vector<DoubleArray>& guides) {
  std::vector<gad::MultiChannelField> out;
  for (const auto& g : guides) out.push_back(to_multi(g));
  return out;
}

py::array_t<double> from_scalar(const gad::ScalarField& f) {
  py::array_t<double> out({f.height(), f.width()});
  std::memcpy(out.mutable_data(), f.values().data(), f.size() * sizeof(double));
  return out;
}

py::array_t<double> from_multi(const gad::MultiChannelField& f) {
  py::array_t<double> out({f.channels(), f.height(), f.width()});
  const std::size_t plane = static_cast<std::size_t>(f.height()) * f.width();
  for (int c = 0; c < f.channels(); ++c)
    std::memcpy(out.mutable_data() + c * plane, f[c].values().data(), plane * sizeof(double));
  return out;
}

gad::LabelMap to_labels(const ByteArray& a, int num_classes, int ignore_id) {
  if (a.ndim() != 2) throw gad::ShapeError("expected a 2-D uint8 label array");
  return gad::LabelMap(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                       std::vector<std::uint8_t>(a.data(), a.data() + a.size()), num_classes, ignore_id);
}

py::array_t<std::uint8_t> from_labels(const gad::LabelMap& l) {
  py::array_t<std::uint8_t> out({l.height(), l.width()});
  std::memcpy(out.mutable_data(), l.ids().data(), l.size());
  return out;
}

gad::Kernel parse_kernel(const std::string& name) {
  if (name == "optimized") return gad::Kernel::Optimized;
  if (name == "reference") return gad::Kernel::Reference;
  throw gad::InvalidArgument("kernel must be 'optimized' or 'reference', got '" + name + "'");
}

gad::GadParams make_params(double k, double lambda, int iterations) {
  gad::GadParams p{k, lambda, iterations};
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Guided anisotropic diffusion";

  // Translators registered later are tried first, so the I/O subclass goes last.
  py::register_exception<gad::Error>(m, "GadError", PyExc_ValueError);
  py::register_exception<gad::IoError>(m, "GadIOError", PyExc_OSError);

  m.attr("MAX_STABLE_LAMBDA") = gad::kMaxStableLambda;

  m.def("set_num_threads", &gad::set_num_threads, py::arg("threads"));
  m.def("num_threads", &gad::num_threads);

  m.def(
      "gad_filter",
      [](const DoubleArray& target, const std::vector<DoubleArray>& guides, double k, double lambda,
         int iterations, const std::string& kernel) {
        const auto t = to_multi(target);
        const auto g = to_guides(guides);
        gad::MultiChannelField out;
        {
          py::gil_scoped_release release;
          out = gad::gad_filter(t, g, make_params(k, lambda, iterations), parse_kernel(kernel));
        }
        return target.ndim() == 2 ? from_scalar(out[0]) : from_multi(out);
      },
      py::arg("target"), py::arg("guides"), py::arg("K") = 0.002, py::arg("lam") = 0.24,
      py::arg("iterations") = 1000, py::arg("kernel") = "optimized",
      "Filter target (H, W) or (C, H, W) with one or more guides.");

  m.def(
      "anisotropic_diffuse",
      [](const DoubleArray& f, double k, double lambda, int iterations, const std::string& kernel) {
        const auto in = to_multi(f);
        gad::MultiChannelField out;
        {
          py::gil_scoped_release release;
          out = gad::anisotropic_diffuse(in, make_params(k, lambda, iterations), parse_kernel(kernel));
        }
        return f.ndim() == 2 ? from_scalar(out[0]) : from_multi(out);
      },
      py::arg("field"), py::arg("K") = 0.002, py::arg("lam") = 0.24, py::arg("iterations") = 1000,
      py::arg("kernel") = "optimized", "Self-guided Perona-Malik diffusion.");

  m.def(
      "binarize", [](const DoubleArray& p, double t) { return from_labels(gad::binarize(to_scalar(p), t)); },
      py::arg("prob"), py::arg("threshold") = 0.5);

  m.def(
      "merge",
      [](const ByteArray& original, const ByteArray& prediction, const std::string& strategy, int ignore_id) {
        return from_labels(gad::merge(to_labels(original, 2, ignore_id), to_labels(prediction, 2, ignore_id),
                                      gad::parse_merge_strategy(strategy)));
      },
      py::arg("original"), py::arg("prediction"), py::arg("strategy") = "intersection",
      py::arg("ignore_id") = gad::kDefaultIgnoreId);

  m.def(
      "cleanse",
      [](const ByteArray& original, const DoubleArray& prob, const std::vector<DoubleArray>& guides, double k,
         double lambda, int iterations, const std::string& strategy, double threshold) {
        return from_labels(gad::cleanse(to_labels(original, 2, gad::kDefaultIgnoreId), to_scalar(prob),
                                        to_guides(guides), make_params(k, lambda, iterations),
                                        gad::parse_merge_strategy(strategy), threshold));
      },
      py::arg("original"), py::arg("prob"), py::arg("guides"), py::arg("K") = 0.002, py::arg("lam") = 0.24,
      py::arg("iterations") = 1000, py::arg("strategy") = "intersection", py::arg("threshold") = 0.5);

  m.def(
      "dice",
      [](const ByteArray& pred, const ByteArray& truth, int class_id, int num_classes, int ignore_id) {
        return gad::dice(gad::confusion(to_labels(pred, num_classes, ignore_id),
                                        to_labels(truth, num_classes, ignore_id)),
                         class_id);
      },
      py::arg("pred"), py::arg("truth"), py::arg("class_id") = 1, py::arg("num_classes") = 2,
      py::arg("ignore_id") = gad::kDefaultIgnoreId);

  m.def(
      "global_accuracy",
      [](const ByteArray& pred, const ByteArray& truth, int num_classes, int ignore_id) {
        return gad::global_accuracy(gad::confusion(to_labels(pred, num_classes, ignore_id),
                                                   to_labels(truth, num_classes, ignore_id)));
      },
      py::arg("pred"), py::arg("truth"), py::arg("num_classes") = 2, py::arg("ignore_id") = gad::kDefaultIgnoreId);

  m.def(
      "boundary_mask",
      [](const ByteArray& truth, int radius, int num_classes, int ignore_id) {
        return from_labels(gad::boundary_mask(to_labels(truth, num_classes, ignore_id), radius));
      },
      py::arg("truth"), py::arg("radius") = 3, py::arg("num_classes") = 2,
      py::arg("ignore_id") = gad::kDefaultIgnoreId);

  m.def(
      "attention_forward",
      [](const DoubleArray& x, const DoubleArray& logits) {
        return from_multi(gad::attention_forward(to_multi(x), gad::AttentionGrid(to_scalar(logits))));
      },
      py::arg("x"), py::arg("logits"));

  m.def(
      "attention_backward",
      [](const DoubleArray& x, const DoubleArray& logits, const DoubleArray& upstream) {
        const auto g =
            gad::attention_backward(to_multi(x), gad::AttentionGrid(to_scalar(logits)), to_multi(upstream));
        return py::make_tuple(from_multi(g.grad_x), from_scalar(g.grad_logits));
      },
      py::arg("x"), py::arg("logits"), py::arg("upstream"), "Returns (grad_x, grad_logits).");

  m.def(
      "global_average_pool", [](const DoubleArray& x) { return gad::global_average_pool(to_multi(x)); },
      py::arg("x"));

  m.def(
      "sharpen_attention",
      [](const DoubleArray& logits, const std::vector<DoubleArray>& guides, double k, double lambda,
         int iterations) {
        const auto g = to_guides(guides);
        return from_scalar(gad::sharpen_attention(gad::AttentionGrid(to_scalar(logits)), g,
                                                  make_params(k, lambda, iterations))
                               .logits());
      },
      py::arg("logits"), py::arg("guides"), py::arg("K") = 0.002, py::arg("lam") = 0.24,
      py::arg("iterations") = 1000);

  m.def(
      "refine_upsampled",
      [](const DoubleArray& probs_low, const DoubleArray& guide, int ss, double k, double lambda, int iterations) {
        const gad::RefinePipelineConfig cfg{ss, make_params(k, lambda, iterations)};
        const auto r = gad::refine_upsampled(to_multi(probs_low), to_multi(guide), cfg);
        return py::make_tuple(from_multi(r.probs), from_labels(r.labels));
      },
      py::arg("probs_low"), py::arg("guide"), py::arg("ss") = 1, py::arg("K") = 0.002, py::arg("lam") = 0.24,
      py::arg("iterations") = 1000, "Returns (refined_probs, labels).");

  m.def(
      "simulate_low_res", [](const DoubleArray& onehot, int ss) {
        return from_multi(gad::simulate_low_res(to_multi(onehot), ss));
      },
      py::arg("onehot"), py::arg("ss"));

  m.def(
      "read_field", [](const std::string& path) { return from_multi(gad::io::read_field(path)); },
      py::arg("path"));
  m.def(
      "write_field", [](const DoubleArray& f, const std::string& path) { gad::io::write_field(to_multi(f), path); },
      py::arg("field"), py::arg("path"));
}
