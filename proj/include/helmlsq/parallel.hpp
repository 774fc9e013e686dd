// Minimal fork-join helper used by assembly and operator sweeps.
//
// All parallel loops in this library write to disjoint output slots and keep
// every reduction in a fixed sequential order, so results are bit-identical
// for any worker count.

#ifndef HELMLSQ_PARALLEL_HPP
#define HELMLSQ_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace helmlsq {

// Process-wide default used when a caller passes workers = 0.
inline std::atomic<int>& worker_setting() {
  static std::atomic<int> v{0};
  return v;
}
inline int default_workers() {
  const int v = worker_setting().load();
  if (v > 0) return v;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? int(hc) : 1;
}
inline void set_default_workers(int n) { worker_setting().store(n); }

// Runs fn(i) for i in [0, n). Static block partition over `workers` threads.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, int workers, Fn&& fn) {
  if (n <= 0) return;
  if (workers <= 0) workers = default_workers();
  workers = static_cast<int>(std::min<std::ptrdiff_t>(workers, n));
  if (workers <= 1 || n < 32) {
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::ptrdiff_t chunk = (n + workers - 1) / workers;
  auto run = [&fn](std::ptrdiff_t lo, std::ptrdiff_t hi) {
    for (std::ptrdiff_t i = lo; i < hi; ++i) fn(i);
  };
  for (int w = 1; w < workers; ++w) {
    const std::ptrdiff_t lo = w * chunk;
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, lo + chunk);
    if (lo < hi) pool.emplace_back(run, lo, hi);
  }
  run(0, std::min<std::ptrdiff_t>(n, chunk));
  for (auto& t : pool) t.join();
}

// Variant passing a worker index so callers can keep per-thread scratch.
// Each index i is processed by exactly one worker; results that are written
// to slot i do not depend on the worker count.
template <typename Fn>
void parallel_for_workers(std::ptrdiff_t n, int workers, Fn&& fn) {
  if (n <= 0) return;
  if (workers <= 0) workers = default_workers();
  workers = static_cast<int>(std::min<std::ptrdiff_t>(workers, n));
  if (workers <= 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(0, i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::ptrdiff_t chunk = (n + workers - 1) / workers;
  auto run = [&fn](int w, std::ptrdiff_t lo, std::ptrdiff_t hi) {
    for (std::ptrdiff_t i = lo; i < hi; ++i) fn(w, i);
  };
  for (int w = 1; w < workers; ++w) {
    const std::ptrdiff_t lo = w * chunk;
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, lo + chunk);
    if (lo < hi) pool.emplace_back(run, w, lo, hi);
  }
  run(0, 0, std::min<std::ptrdiff_t>(n, chunk));
  for (auto& t : pool) t.join();
}

}  // namespace helmlsq

#endif
