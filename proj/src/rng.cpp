#include "stheat/rng.hpp"

#include <cmath>
#include <numbers>

namespace stheat {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline PhiloxCounter round(const PhiloxCounter& c, const PhiloxKey& k) noexcept {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// 53-bit mantissa in (0, 1].
inline double to_unit_open_closed(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  ctr = round(ctr, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeylA;
    key[1] += kWeylB;
    ctr = round(ctr, key);
  }
  return ctr;
}

PhiloxCounter CounterRng::counter(std::uint64_t path, std::uint32_t a, std::uint32_t b,
                                  Stream s) const noexcept {
  const auto path_lo = static_cast<std::uint32_t>(path);
  const auto path_hi = static_cast<std::uint32_t>((path >> 32) & 0xFFFFu);
  return {a, b, path_lo, (path_hi << 16) | static_cast<std::uint32_t>(s)};
}

std::pair<double, double> CounterRng::uniforms(std::uint64_t path, std::uint32_t a,
                                               std::uint32_t b, Stream s) const noexcept {
  const PhiloxKey key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  const PhiloxCounter out = philox4x32_10(counter(path, a, b, s), key);
  const std::uint64_t w0 = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t w1 = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  return {to_unit_open_closed(w0), to_unit_open_closed(w1)};
}

std::pair<double, double> CounterRng::normals(std::uint64_t path, std::uint32_t a,
                                              std::uint32_t b, Stream s) const noexcept {
  const auto [u1, u2] = uniforms(path, a, b, s);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace stheat
