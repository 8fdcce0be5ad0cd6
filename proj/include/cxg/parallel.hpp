#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace cxg {

/// Runs `body(begin, end, worker)` over contiguous slices of [0, n). Worker
/// indices are dense in [0, workers); results merged by worker index are
/// independent of scheduling.
template <typename Body>
void parallel_chunks(std::size_t n, unsigned workers, Body&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    body(std::size_t{0}, n, 0u);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t step = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * step);
    const std::size_t end = std::min(n, begin + step);
    pool.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline unsigned effective_workers(std::size_t n, unsigned requested) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned want = requested == 0 ? hw : requested;
  return std::max(1u, std::min<unsigned>(want, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
}

}  // namespace cxg
