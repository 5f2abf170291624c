#include "gad/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gad/errors.hpp"

namespace gad {

void GadParams::validate() const {
  if (!(k > 0.0) || !std::isfinite(k))
    throw InvalidArgument("contrast parameter K must be > 0, got " + std::to_string(k));
  if (!(lambda > 0.0) || lambda > kMaxStableLambda)
    throw InvalidArgument("step size lambda must lie in (0, 0.25] for a stable 4-neighbour scheme, got " +
                          std::to_string(lambda));
  if (iterations < 0)
    throw InvalidArgument("iteration count must be >= 0, got " + std::to_string(iterations));
  if (!(early_exit_tolerance >= 0.0))
    throw InvalidArgument("early-exit tolerance must be >= 0");
}

namespace {

void check_k(double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw InvalidArgument("contrast parameter K must be > 0, got " + std::to_string(k));
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || lambda > kMaxStableLambda)
    throw InvalidArgument("step size lambda must lie in (0, 0.25], got " + std::to_string(lambda));
}

void check_guides(std::span<const MultiChannelField> guides) {
  if (guides.empty()) throw InvalidArgument("at least one guide is required");
  for (const auto& g : guides) require_same_shape(guides.front(), g, "guide dimensions differ");
}

// ---------------------------------------------------------------------------
// Reference kernels: per-pixel / per-edge loops through the bounds-checked
// accessors. Slow and obvious; the optimized path is tested against these.

CoefficientField ref_coeff(const MultiChannelField& guide, double k) {
  const int h = guide.height();
  const int w = guide.width();
  const double denom = guide.channels() * k;
  CoefficientField out{ScalarField(h, w), ScalarField(h, w)};
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (c + 1 < w) {
        double s = 0.0;
        for (const auto& p : guide.planes()) s += std::abs(p(r, c + 1) - p(r, c));
        s /= denom;
        out.east(r, c) = 1.0 / (1.0 + s * s);
      }
      if (r + 1 < h) {
        double s = 0.0;
        for (const auto& p : guide.planes()) s += std::abs(p(r + 1, c) - p(r, c));
        s /= denom;
        out.south(r, c) = 1.0 / (1.0 + s * s);
      }
    }
  return out;
}

void ref_min_into(CoefficientField& acc, const CoefficientField& other) {
  const int h = acc.height();
  const int w = acc.width();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      acc.east(r, c) = std::min(acc.east(r, c), other.east(r, c));
      acc.south(r, c) = std::min(acc.south(r, c), other.south(r, c));
    }
}

ScalarField ref_step(const ScalarField& f, const CoefficientField& cf, double lambda) {
  const int h = f.height();
  const int w = f.width();
  ScalarField out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double here = f(r, c);
      double acc = 0.0;
      if (c + 1 < w) acc += cf.east(r, c) * (f(r, c + 1) - here);
      if (c > 0) acc += cf.east(r, c - 1) * (f(r, c - 1) - here);
      if (r + 1 < h) acc += cf.south(r, c) * (f(r + 1, c) - here);
      if (r > 0) acc += cf.south(r - 1, c) * (f(r - 1, c) - here);
      out(r, c) = here + lambda * acc;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Optimized kernels: raw row pointers, border rows/columns peeled so the
// interior loops vectorize, rows distributed over OpenMP threads. Every
// output element is computed by the same arithmetic regardless of the row
// partition, so results are independent of the thread count.

void opt_coeff_into(const MultiChannelField& guide, double k, CoefficientField& out) {
  const int h = guide.height();
  const int w = guide.width();
  const int nch = guide.channels();
  const double inv = 1.0 / (nch * k);

#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    double* east = out.east.row(r).data();
    double* south = out.south.row(r).data();
    std::fill(east, east + w, 0.0);
    std::fill(south, south + w, 0.0);
    for (int ch = 0; ch < nch; ++ch) {
      const double* p = guide[ch].row(r).data();
      for (int c = 0; c + 1 < w; ++c) east[c] += std::abs(p[c + 1] - p[c]);
      if (r + 1 < h) {
        const double* q = p + w;
        for (int c = 0; c < w; ++c) south[c] += std::abs(q[c] - p[c]);
      }
    }
    for (int c = 0; c + 1 < w; ++c) {
      const double s = east[c] * inv;
      east[c] = 1.0 / (1.0 + s * s);
    }
    if (w > 0) east[w - 1] = 0.0;
    if (r + 1 < h) {
      for (int c = 0; c < w; ++c) {
        const double s = south[c] * inv;
        south[c] = 1.0 / (1.0 + s * s);
      }
    } else {
      std::fill(south, south + w, 0.0);
    }
  }
}

void opt_min_into(CoefficientField& acc, const CoefficientField& other) {
  auto ae = acc.east.values();
  auto as = acc.south.values();
  const auto oe = other.east.values();
  const auto os = other.south.values();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ae.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    ae[i] = std::min(ae[i], oe[i]);
    as[i] = std::min(as[i], os[i]);
  }
}

template <bool HasUp, bool HasDown>
void opt_step_row(const double* fr, const double* up, const double* dn, const double* ce,
                  const double* cs, const double* csu, double* out, int w, double lambda) {
  auto vertical = [&](int c) {
    double v = 0.0;
    if constexpr (HasDown) v += cs[c] * (dn[c] - fr[c]);
    if constexpr (HasUp) v += csu[c] * (up[c] - fr[c]);
    return v;
  };
  if (w == 1) {
    out[0] = fr[0] + lambda * vertical(0);
    return;
  }
  out[0] = fr[0] + lambda * (ce[0] * (fr[1] - fr[0]) + vertical(0));
  for (int c = 1; c < w - 1; ++c) {
    double acc = ce[c] * (fr[c + 1] - fr[c]) + ce[c - 1] * (fr[c - 1] - fr[c]);
    if constexpr (HasDown) acc += cs[c] * (dn[c] - fr[c]);
    if constexpr (HasUp) acc += csu[c] * (up[c] - fr[c]);
    out[c] = fr[c] + lambda * acc;
  }
  const int c = w - 1;
  out[c] = fr[c] + lambda * (ce[c - 1] * (fr[c - 1] - fr[c]) + vertical(c));
}

void opt_step_into(const ScalarField& f, const CoefficientField& cf, double lambda,
                   ScalarField& out) {
  const int h = f.height();
  const int w = f.width();
  if (h == 0 || w == 0) return;
  const double* base = f.values().data();
  const double* ce = cf.east.values().data();
  const double* cs = cf.south.values().data();
  double* dst = out.values().data();

#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    const std::size_t off = static_cast<std::size_t>(r) * w;
    const double* fr = base + off;
    const double* up = r > 0 ? fr - w : nullptr;
    const double* dn = r + 1 < h ? fr + w : nullptr;
    const double* csu = r > 0 ? cs + off - w : nullptr;
    if (up && dn)
      opt_step_row<true, true>(fr, up, dn, ce + off, cs + off, csu, dst + off, w, lambda);
    else if (dn)
      opt_step_row<false, true>(fr, up, dn, ce + off, cs + off, csu, dst + off, w, lambda);
    else if (up)
      opt_step_row<true, false>(fr, up, dn, ce + off, cs + off, csu, dst + off, w, lambda);
    else
      opt_step_row<false, false>(fr, up, dn, ce + off, cs + off, csu, dst + off, w, lambda);
  }
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  const auto av = a.values();
  const auto bv = b.values();
  double m = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
  return m;
}

// Shared driver for both kernels. `Ops` supplies coefficient, min and step
// primitives; buffers are reused across iterations.
struct ReferenceOps {
  static void coeff(const MultiChannelField& g, double k, CoefficientField& out) {
    out = ref_coeff(g, k);
  }
  static void min_into(CoefficientField& acc, const CoefficientField& o) { ref_min_into(acc, o); }
  static void step(const ScalarField& f, const CoefficientField& c, double lambda,
                   ScalarField& out) {
    out = ref_step(f, c, lambda);
  }
};

struct OptimizedOps {
  static void coeff(const MultiChannelField& g, double k, CoefficientField& out) {
    opt_coeff_into(g, k, out);
  }
  static void min_into(CoefficientField& acc, const CoefficientField& o) { opt_min_into(acc, o); }
  static void step(const ScalarField& f, const CoefficientField& c, double lambda,
                   ScalarField& out) {
    opt_step_into(f, c, lambda, out);
  }
};

template <class Ops>
MultiChannelField run_gad(const MultiChannelField& target, std::span<const MultiChannelField> guides,
                          const GadParams& params) {
  const int h = target.height();
  const int w = target.width();
  std::vector<MultiChannelField> g(guides.begin(), guides.end());
  MultiChannelField t = target;
  if (params.iterations == 0) return t;

  const CoefficientField blank{ScalarField(h, w), ScalarField(h, w)};
  std::vector<CoefficientField> gc(g.size(), blank);
  CoefficientField cmin = blank;
  ScalarField scratch(h, w);

  for (int it = 0; it < params.iterations; ++it) {
    for (std::size_t j = 0; j < g.size(); ++j) Ops::coeff(g[j], params.k, gc[j]);
    cmin = gc.front();
    for (std::size_t j = 1; j < g.size(); ++j) Ops::min_into(cmin, gc[j]);

    // The evolved guides are only read by later iterations.
    if (it + 1 < params.iterations)
      for (std::size_t j = 0; j < g.size(); ++j)
        for (auto& plane : g[j].planes()) {
          Ops::step(plane, gc[j], params.lambda, scratch);
          std::swap(plane, scratch);
        }

    double max_update = 0.0;
    for (auto& plane : t.planes()) {
      Ops::step(plane, cmin, params.lambda, scratch);
      if (params.early_exit_tolerance > 0.0)
        max_update = std::max(max_update, max_abs_diff(plane, scratch));
      std::swap(plane, scratch);
    }
    if (params.early_exit_tolerance > 0.0 && max_update < params.early_exit_tolerance) break;
  }
  return t;
}

template <class Ops>
MultiChannelField run_self(const MultiChannelField& f, const GadParams& params) {
  MultiChannelField t = f;
  const int h = f.height();
  const int w = f.width();
  CoefficientField c{ScalarField(h, w), ScalarField(h, w)};
  ScalarField scratch(h, w);
  for (int it = 0; it < params.iterations; ++it) {
    Ops::coeff(t, params.k, c);
    double max_update = 0.0;
    for (auto& plane : t.planes()) {
      Ops::step(plane, c, params.lambda, scratch);
      if (params.early_exit_tolerance > 0.0)
        max_update = std::max(max_update, max_abs_diff(plane, scratch));
      std::swap(plane, scratch);
    }
    if (params.early_exit_tolerance > 0.0 && max_update < params.early_exit_tolerance) break;
  }
  return t;
}

}  // namespace

double coeff_scalar(double grad_mag, double k) {
  check_k(k);
  if (!(grad_mag >= 0.0)) throw InvalidArgument("gradient magnitude must be >= 0");
  const double s = grad_mag / k;
  return 1.0 / (1.0 + s * s);
}

CoefficientField coeff_rgb(const MultiChannelField& guide, double k) {
  check_k(k);
  if (guide.channels() < 1) throw InvalidArgument("guide has no channels");
  CoefficientField out{ScalarField(guide.height(), guide.width()),
                       ScalarField(guide.height(), guide.width())};
  opt_coeff_into(guide, k, out);
  return out;
}

CoefficientField coeff_multi_guide(std::span<const MultiChannelField> guides, double k) {
  check_guides(guides);
  CoefficientField out = coeff_rgb(guides.front(), k);
  for (std::size_t j = 1; j < guides.size(); ++j) opt_min_into(out, coeff_rgb(guides[j], k));
  return out;
}

ScalarField diffusion_step(const ScalarField& f, const CoefficientField& c, double lambda,
                           Kernel kernel) {
  check_lambda(lambda);
  require_same_shape(f, c.east, "coefficient field does not match the raster");
  require_same_shape(f, c.south, "coefficient field does not match the raster");
  for (auto plane : {c.east.values(), c.south.values()})
    for (double v : plane)
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("diffusion coefficients must lie in [0,1]");
  if (kernel == Kernel::Reference) return ref_step(f, c, lambda);
  ScalarField out(f.height(), f.width());
  opt_step_into(f, c, lambda, out);
  return out;
}

ScalarField anisotropic_diffuse(const ScalarField& f, const GadParams& params, Kernel kernel) {
  return anisotropic_diffuse(MultiChannelField(f), params, kernel)[0];
}

MultiChannelField anisotropic_diffuse(const MultiChannelField& f, const GadParams& params,
                                      Kernel kernel) {
  params.validate();
  if (f.channels() < 1) throw InvalidArgument("field has no channels");
  return kernel == Kernel::Reference ? run_self<ReferenceOps>(f, params)
                                     : run_self<OptimizedOps>(f, params);
}

MultiChannelField gad_filter(const MultiChannelField& target,
                             std::span<const MultiChannelField> guides, const GadParams& params,
                             Kernel kernel) {
  params.validate();
  check_guides(guides);
  if (target.channels() < 1) throw InvalidArgument("target has no channels");
  require_same_shape(target, guides.front(), "target and guide dimensions differ");
  return kernel == Kernel::Reference ? run_gad<ReferenceOps>(target, guides, params)
                                     : run_gad<OptimizedOps>(target, guides, params);
}

}  // namespace gad
