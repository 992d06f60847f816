#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace shapekit {

namespace detail {
inline thread_local bool inside_parallel_for = false;
}

/// Runs body(i) for i in [0, count). Work items must be independent;
/// callers get determinism by writing into preallocated per-index slots.
/// Nested calls degrade to serial loops. The first exception thrown by any
/// item is rethrown on the caller.
inline void parallel_for(int count, const std::function<void(int)>& body) {
  if (count <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int n_threads = static_cast<int>(hw == 0 ? 1 : hw);
  if (n_threads > count) n_threads = count;
  if (detail::inside_parallel_for) n_threads = 1;
  if (n_threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&]() {
      detail::inside_parallel_for = true;
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace shapekit
