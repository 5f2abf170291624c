#include "gad/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gad {

namespace {

int env_threads() {
  const char* v = std::getenv(kThreadsEnvVar);
  if (v == nullptr || *v == '\0') return 0;
  try {
    const int n = std::stoi(v);
    return n > 0 ? n : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

void set_num_threads(int requested) {
#ifdef _OPENMP
  int n = env_threads();
  if (n == 0) n = requested > 0 ? requested : omp_get_num_procs();
  omp_set_num_threads(n);
#else
  (void)requested;
#endif
}

int num_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool parallel_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace gad
