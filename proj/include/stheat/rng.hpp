#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace stheat {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3", SC'11). Stateless: the output is a pure function of
/// (counter, key).
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// Independent draw families sharing one master seed. The tag occupies the
/// low 16 bits of the last counter word.
enum class Stream : std::uint16_t {
  Noise = 0,           // (dW, iW) pair per (mode, interval)
  OracleResidual = 1,  // component of the OU integral orthogonal to (dW, iW)
  Kappa = 2,           // random diffusion multiplier per interval
  Scratch = 3,         // tests and brute-force constructions
};

/// Identifies one Monte Carlo path: every random quantity of the path is a
/// function of (seed, path, indices, stream) only.
struct PathId {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
};

/// Counter-based sampler. Draws at (path, a, b, stream) never depend on which
/// other draws were made before, so paths, modes and intervals can be
/// generated in any order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Two independent U(0,1] variates.
  std::pair<double, double> uniforms(std::uint64_t path, std::uint32_t a, std::uint32_t b,
                                     Stream s) const noexcept;

  /// Two independent N(0,1) variates (Box-Muller on one Philox block).
  std::pair<double, double> normals(std::uint64_t path, std::uint32_t a, std::uint32_t b,
                                    Stream s) const noexcept;

 private:
  PhiloxCounter counter(std::uint64_t path, std::uint32_t a, std::uint32_t b,
                        Stream s) const noexcept;

  std::uint64_t seed_;
};

}  // namespace stheat
