#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mrng::detail {

inline uint32_t resolve_threads(uint32_t requested) {
  if (requested != 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1u : static_cast<uint32_t>(hc);
}

// Runs fn(i) for i in [0, count). fn(i) must only write state owned by
// index i, which makes the result independent of the thread count.
template <typename Fn>
void parallel_for(uint64_t count, uint32_t threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count < 2) {
    for (uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }

  uint64_t chunk = count / (static_cast<uint64_t>(threads) * 8);
  if (chunk == 0) chunk = 1;

  std::atomic<uint64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      uint64_t begin = next.fetch_add(chunk, std::memory_order_relaxed);
      if (begin >= count) return;
      uint64_t end = begin + chunk < count ? begin + chunk : count;
      try {
        for (uint64_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (uint32_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mrng::detail
