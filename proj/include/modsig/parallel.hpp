#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace modsig {

unsigned default_workers();

// Calls task(i) for i in [0, count) on up to `workers` threads.
template <class Task>
void parallel_for(std::size_t count, unsigned workers, Task&& task) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) task(i);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers && w < count; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

}  // namespace modsig
