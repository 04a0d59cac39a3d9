#include "geom/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace geom {

std::size_t thread_count() {
  if (const char* env = std::getenv("GEOM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace {

void reduce_range(std::span<const double> rows, std::size_t width, std::size_t lo, std::size_t hi,
                  double* out) {
  if (hi - lo == 1) {
    std::copy_n(rows.data() + lo * width, width, out);
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<double> right(width);
  reduce_range(rows, width, lo, mid, out);
  reduce_range(rows, width, mid, hi, right.data());
  for (std::size_t k = 0; k < width; ++k) out[k] += right[k];
}

}  // namespace

std::vector<double> pairwise_reduce(std::span<const double> rows, std::size_t width) {
  std::vector<double> out(width, 0.0);
  if (width == 0 || rows.empty()) return out;
  reduce_range(rows, width, 0, rows.size() / width, out.data());
  return out;
}

}  // namespace geom
