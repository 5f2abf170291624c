#include "gad/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "gad/diffusion.hpp"
#include "gad/errors.hpp"
#include "gad/parallel.hpp"

namespace gad {

namespace {

// Piecewise-constant blocks plus mild noise, so the coefficients are a mix
// of open and blocked edges as in real imagery.
MultiChannelField blocky_rgb(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> level(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.01);
  constexpr int kBlock = 32;
  const int nb = (n + kBlock - 1) / kBlock;
  MultiChannelField f(3, n, n);
  for (auto& plane : f.planes()) {
    std::vector<double> levels(static_cast<std::size_t>(nb) * nb);
    for (double& v : levels) v = level(rng);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        plane(r, c) = levels[static_cast<std::size_t>(r / kBlock) * nb + c / kBlock] + noise(rng);
  }
  return f;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& config) {
  if (config.size < 2) throw InvalidArgument("benchmark size must be >= 2");
  if (config.iterations < 1) throw InvalidArgument("benchmark needs at least one iteration");
  std::mt19937_64 rng(config.seed);
  const int n = config.size;
  const std::vector<MultiChannelField> guides{blocky_rgb(n, rng), blocky_rgb(n, rng)};

  std::uniform_real_distribution<double> u(0.0, 1.0);
  MultiChannelField target(2, n, n);
  for (std::size_t i = 0; i < target[0].size(); ++i) {
    const double p = u(rng);
    target[0].values()[i] = p;
    target[1].values()[i] = 1.0 - p;
  }
  const GadParams params{0.05, 0.24, config.iterations};

  BenchReport rep;
  rep.size = n;
  rep.iterations = config.iterations;
  const double work = static_cast<double>(n) * n * config.iterations / 1e6;

  set_num_threads(1);
  auto t0 = std::chrono::steady_clock::now();
  const auto single = gad_filter(target, guides, params);
  rep.seconds_single = elapsed(t0);

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  rep.threads_multi = config.threads > 0 ? config.threads : std::max(2, hw);
  set_num_threads(rep.threads_multi);
  rep.threads_multi = num_threads();
  t0 = std::chrono::steady_clock::now();
  const auto multi = gad_filter(target, guides, params);
  rep.seconds_multi = elapsed(t0);
  set_num_threads(config.threads);

  rep.multi_matches_single = single == multi;
  rep.mpix_per_s_single = work / rep.seconds_single;
  rep.mpix_per_s_multi = work / rep.seconds_multi;

  if (config.run_reference) {
    t0 = std::chrono::steady_clock::now();
    const auto ref = gad_filter(target, guides, params, Kernel::Reference);
    rep.seconds_reference = elapsed(t0);
    double m = 0.0;
    for (int c = 0; c < ref.channels(); ++c)
      for (std::size_t i = 0; i < ref[c].size(); ++i)
        m = std::max(m, std::abs(ref[c].values()[i] - single[c].values()[i]));
    rep.max_abs_diff_reference = m;
  }
  return rep;
}

}  // namespace gad
