#pragma once

namespace vfsl {

/// Caps internal parallelism. 0 restores the runtime default.
void set_thread_count(int threads);

/// Applies VFSL_THREADS from the environment, if set. Returns the value used.
int configure_threads_from_env();

int thread_count();

}  // namespace vfsl
