#include "hull_lab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hull_lab {

namespace {
std::atomic<bool> g_sequential{true};
}

void set_sequential(bool on) { g_sequential.store(on); }
bool sequential_mode() { return g_sequential.load(); }

int worker_count() {
  if (sequential_mode()) return 1;
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("HULL_LAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) hw = std::min(hw, cap);
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const int workers = worker_count();
  if (workers <= 1 || n < 2048) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hull_lab
