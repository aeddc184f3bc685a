#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stheat/rng.hpp"

namespace stheat {

struct MCSummary {
  double estimate = 0.0;
  double std_error = 0.0;  // sample std / sqrt(M)
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

/// Number of worker threads used for path-parallel loops. Defaults to the
/// hardware concurrency; STHEAT_THREADS overrides.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) across worker threads. Each index must
/// write only to its own output slot.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Mean and standard error of per-path values, with compensated summation so
/// the estimate does not depend on path order beyond rounding.
MCSummary summarize(std::span<const double> values, std::uint64_t seed);

/// E[kernel] over paths first_path .. first_path + M - 1 of `seed`.
/// Throws std::invalid_argument for M < 2.
MCSummary mc_expectation(const std::function<double(PathId)>& kernel, std::size_t M,
                         std::uint64_t seed, std::uint64_t first_path = 0);

/// Several statistics per path. Returns values[stat][path].
std::vector<std::vector<double>> mc_collect(
    const std::function<std::vector<double>(PathId)>& kernel, std::size_t stats, std::size_t M,
    std::uint64_t seed, std::uint64_t first_path = 0);

}  // namespace stheat
