#include "lrru/parallel.hpp"

#include <cstdlib>
#include <string>

#include "lrru/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lrru {

namespace {

#ifdef _OPENMP
const int kDefaultThreads = omp_get_max_threads();
#endif

}  // namespace

void set_thread_count(int threads) {
  if (threads < 0) throw UsageError("thread count must be >= 0");
#ifdef _OPENMP
  omp_set_num_threads(threads == 0 ? kDefaultThreads : threads);
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void apply_thread_env() {
  const char* env = std::getenv("LRRU_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0 || v > 4096) {
    throw UsageError("LRRU_THREADS must be a non-negative integer, got '" + std::string(env) + "'");
  }
  set_thread_count(static_cast<int>(v));
}

}  // namespace lrru
