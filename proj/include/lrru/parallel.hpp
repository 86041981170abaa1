#pragma once

namespace lrru {

/// Caps the worker threads used inside ops; 0 restores the runtime default.
void set_thread_count(int threads);
int thread_count();

/// Applies LRRU_THREADS from the environment when it is set.
void apply_thread_env();

}  // namespace lrru
