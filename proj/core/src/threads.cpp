#include "vfsl/threads.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

#include <Eigen/Core>

#if defined(VFSL_HAVE_OPENMP)
#include <omp.h>
#endif

#include "vfsl/error.hpp"

namespace vfsl {

void set_thread_count(int threads) {
  if (threads < 0) throw Error(ErrorCode::InvalidArgument, "thread count must be >= 0");
#if defined(VFSL_HAVE_OPENMP)
  const int n = threads == 0 ? omp_get_num_procs() : threads;
  omp_set_num_threads(n);
  Eigen::setNbThreads(n);
#else
  Eigen::setNbThreads(threads == 0 ? 1 : threads);
#endif
}

int configure_threads_from_env() {
  const char* env = std::getenv("VFSL_THREADS");
  if (env == nullptr || *env == '\0') return thread_count();
  int value = 0;
  const auto* end = env + std::strlen(env);
  const auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc{} || ptr != end || value < 0) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("VFSL_THREADS must be a non-negative integer, got '") + env + "'");
  }
  set_thread_count(value);
  return thread_count();
}

int thread_count() { return Eigen::nbThreads(); }

}  // namespace vfsl
