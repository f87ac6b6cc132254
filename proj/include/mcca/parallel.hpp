#ifndef MCCA_PARALLEL_HPP
#define MCCA_PARALLEL_HPP

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

namespace mcca {

/// Worker count from MCCA_NUM_THREADS; 1 when unset or unparsable.
inline std::size_t thread_count() {
  const char* env = std::getenv("MCCA_NUM_THREADS");
  if (env == nullptr) return 1;
  unsigned value = 0;
  const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), value);
  if (ec != std::errc() || value == 0) return 1;
  return value;
}

/// Runs fn(i) for i in [0, n). Each index is handled exactly once; results
/// must be written to per-index slots so the outcome is independent of the
/// thread count. The first exception (lowest index) is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t threads = thread_count()) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace mcca

#endif  // MCCA_PARALLEL_HPP
