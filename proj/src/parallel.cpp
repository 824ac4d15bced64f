#include "mide/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mide {

namespace {

std::size_t initial_thread_count() {
  if (const char* env = std::getenv("MIDE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return 1;
}

std::atomic<std::size_t>& threads_setting() {
  static std::atomic<std::size_t> value{initial_thread_count()};
  return value;
}

thread_local bool inside_worker = false;

}  // namespace

void set_thread_count(std::size_t threads) { threads_setting() = std::max<std::size_t>(1, threads); }

std::size_t thread_count() { return threads_setting(); }

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body) {
  if (end <= begin) return;
  const std::size_t count = end - begin;
  const std::size_t workers = std::min(thread_count(), count);
  if (workers <= 1 || inside_worker) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run_chunk = [&](std::size_t w) {
    inside_worker = true;
    const std::size_t lo = begin + count * w / workers;
    const std::size_t hi = begin + count * (w + 1) / workers;
    try {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
    inside_worker = false;
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_chunk, w);
  run_chunk(0);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mide
