#include "stheat/montecarlo.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "stheat/numerics.hpp"

namespace stheat {

std::size_t worker_count() {
  if (const char* env = std::getenv("STHEAT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
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

MCSummary summarize(std::span<const double> values, std::uint64_t seed) {
  MCSummary s;
  s.paths = values.size();
  s.seed = seed;
  if (values.empty()) return s;
  const double mean = compensated_sum(values) / static_cast<double>(values.size());
  CompensatedSum ss;
  for (double v : values) ss.add((v - mean) * (v - mean));
  s.estimate = mean;
  if (values.size() > 1) {
    const double var = ss.value() / static_cast<double>(values.size() - 1);
    s.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return s;
}

MCSummary mc_expectation(const std::function<double(PathId)>& kernel, std::size_t M,
                         std::uint64_t seed, std::uint64_t first_path) {
  if (M < 2) throw std::invalid_argument("mc_expectation: need at least 2 paths");
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> values(M);
  parallel_for(M, [&](std::size_t i) { values[i] = kernel(PathId{seed, first_path + i}); });
  MCSummary s = summarize(values, seed);
  s.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

std::vector<std::vector<double>> mc_collect(
    const std::function<std::vector<double>(PathId)>& kernel, std::size_t stats, std::size_t M,
    std::uint64_t seed, std::uint64_t first_path) {
  if (M < 2) throw std::invalid_argument("mc_collect: need at least 2 paths");
  std::vector<std::vector<double>> out(stats, std::vector<double>(M));
  parallel_for(M, [&](std::size_t i) {
    const std::vector<double> v = kernel(PathId{seed, first_path + i});
    if (v.size() != stats) throw std::logic_error("mc_collect: kernel returned wrong arity");
    for (std::size_t k = 0; k < stats; ++k) out[k][i] = v[k];
  });
  return out;
}

}  // namespace stheat
