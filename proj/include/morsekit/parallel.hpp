#pragma once
#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace morsekit {

//! Worker count: hardware concurrency, capped by MORSEKIT_THREADS if set.
inline unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("MORSEKIT_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1)
        n = std::min(n, unsigned(cap));
    } catch (...) {
    }
  }
  return n;
}

//! Calls fn(i) for i in [0, count). Each index is visited exactly once, so
//! results written by index are deterministic regardless of thread count.
//! The first exception thrown by any worker is rethrown.
template <class Fn> void parallel_for(std::size_t count, Fn &&fn) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex mtx;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers)
          fn(i);
      } catch (...) {
        std::lock_guard lock(mtx);
        if (!first_error)
          first_error = std::current_exception();
      }
    });
  }
  for (auto &t : pool)
    t.join();
  if (first_error)
    std::rethrow_exception(first_error);
}

} // namespace morsekit
