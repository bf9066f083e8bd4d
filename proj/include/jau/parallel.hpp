#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace jau {

/// Splits [0, count) into at most `threads` contiguous ranges and calls
/// fn(begin, end, worker) for each, the first on the calling thread.
/// Returns once all ranges are done; the first exception thrown is rethrown.
template <class Index, class Fn>
void parallel_for(std::size_t threads, Index count, Fn&& fn) {
  if (count <= 0) return;
  const auto workers = static_cast<Index>(
      std::min<std::size_t>(std::max<std::size_t>(threads, 1), static_cast<std::size_t>(count)));
  if (workers == 1) {
    fn(Index{0}, count, std::size_t{0});
    return;
  }
  const Index base = count / workers;
  const Index extra = count % workers;
  auto range_begin = [&](Index w) { return w * base + std::min(w, extra); };

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](Index w) {
    try {
      fn(range_begin(w), range_begin(w + 1), static_cast<std::size_t>(w));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (Index w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace jau
