#include "dopclust/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

namespace dopclust {

namespace {
// Nested parallel_for calls run inline on the calling worker.
thread_local bool in_parallel_region = false;
}  // namespace

std::size_t thread_count() {
  if (const char* env = std::getenv("DOPCLUST_THREADS"); env != nullptr) {
    std::size_t value = 0;
    const auto* end = env + std::strlen(env);
    if (auto [ptr, ec] = std::from_chars(env, end, value); ec == std::errc{} && ptr == end && value > 0) {
      return value;
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1 || in_parallel_region) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    const bool outer = in_parallel_region;
    in_parallel_region = true;
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    in_parallel_region = outer;
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace dopclust
