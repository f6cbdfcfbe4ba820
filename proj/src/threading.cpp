#include "ophydro/threading.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ophydro {

int default_thread_count() {
  if (const char* env = std::getenv("OPHYDRO_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
      // fall through to hardware default
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int n_threads,
                  const std::function<void(std::size_t, std::size_t, int)>& body) {
  if (n == 0) return;
  if (n_threads <= 0) n_threads = default_thread_count();
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
  if (workers <= 1) {
    body(0, n, 0);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end, w] { body(begin, end, static_cast<int>(w)); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ophydro
