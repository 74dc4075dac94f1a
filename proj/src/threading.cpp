#include "euaf/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace euaf {

std::size_t thread_count() {
  if (const char* env = std::getenv("EUAF_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(thread_count(), n_chunks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_chunks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_chunks) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace euaf
