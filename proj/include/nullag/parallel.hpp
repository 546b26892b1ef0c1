#ifndef NULLAG_PARALLEL_HPP
#define NULLAG_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace nullag {

/** Runs body(i) for i in [0, count) on all hardware threads.
 *  Work items must be independent; any shared output slot must be
 *  owned by exactly one index. */
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& body) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  if (workers > count) workers = static_cast<unsigned>(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace nullag

#endif
