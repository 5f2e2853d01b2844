#include "pcp/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pcp {

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)> &body) {
  if (n == 0) return;
  const std::size_t t = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (t <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first;
  std::mutex mu;
  const std::size_t chunk = (n + t - 1) / t;
  for (std::size_t w = 0; w < t; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        body(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto &th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

int threads_from_env(int fallback) {
  const char *s = std::getenv("PCP_THREADS");
  if (!s) return fallback;
  try {
    const int v = std::stoi(s);
    return v >= 1 ? v : fallback;
  } catch (...) {
    return fallback;
  }
}

}  // namespace pcp
