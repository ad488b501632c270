#pragma once

#include <cstddef>

#include <omp.h>

namespace sleigh {

/// Serial is the reference path; Parallel must reproduce it bit for bit.
enum class Execution { Serial, Parallel };

/// Runs fn(i) for i in [0, n). Each index must write only its own output slot.
template <class Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

inline void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace sleigh
