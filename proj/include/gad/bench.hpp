#pragma once

#include <cstdint>

namespace gad {

struct BenchConfig {
  int size = 512;
  int iterations = 100;
  int threads = 0;  ///< 0 = hardware default (at least 2 for the determinism check)
  std::uint64_t seed = 1;
  bool run_reference = true;
};

struct BenchReport {
  int size = 0;
  int iterations = 0;
  int threads_multi = 0;
  double seconds_single = 0.0;
  double seconds_multi = 0.0;
  double seconds_reference = 0.0;
  double mpix_per_s_single = 0.0;  ///< target pixels x iterations / second
  double mpix_per_s_multi = 0.0;
  double max_abs_diff_reference = 0.0;  ///< optimized vs reference kernel
  bool multi_matches_single = false;    ///< bit-identical outputs
};

/// Times gad_filter on a change-detection shaped workload: two 3-channel
/// guides and a 2-class probability target, size x size pixels.
BenchReport run_benchmark(const BenchConfig& config);

}  // namespace gad
