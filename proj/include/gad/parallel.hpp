#pragma once

namespace gad {

/// Environment variable that overrides the thread count chosen by callers.
inline constexpr const char* kThreadsEnvVar = "GAD_NUM_THREADS";

/// Sets the worker count used by the diffusion kernels. 0 selects the
/// hardware default. A positive GAD_NUM_THREADS in the environment takes
/// precedence over `requested`. Results never depend on this value.
void set_num_threads(int requested);

/// Worker count the kernels will currently use.
int num_threads();

/// True when the library was built with OpenMP.
bool parallel_enabled();

}  // namespace gad
