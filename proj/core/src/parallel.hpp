#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace sparselab::detail {

// Runs body(i) for i in [0, count) on up to `threads` workers. Items are
// independent, so results do not depend on scheduling; the first failing
// item's exception (by index) is rethrown after all workers finish.
template <class F>
void parallel_for(int count, int threads, F&& body) {
  if (count <= 0) return;
  const int workers = std::max(1, std::min(threads, count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sparselab::detail
