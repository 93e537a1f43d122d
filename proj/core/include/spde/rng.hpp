#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace spde::rng {

// Philox 4x32-10 counter-based generator (Salmon et al., SC'11). Streams are
// addressed by (path, step, block), never by generator state, so any slice of
// a simulation can be reproduced or coupled across resolutions without
// replaying the whole run.
struct Philox4x32 {
  static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85u;
  static constexpr std::uint32_t kMulA = 0xD2511F53u;
  static constexpr std::uint32_t kMulB = 0xCD9E8D57u;

  static inline void round(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                           std::uint32_t k1) {
    std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c[2];
    std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
  }

  static inline std::array<std::uint32_t, 4> block(
      std::array<std::uint32_t, 4> counter, std::uint64_t key) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int i = 0; i < 10; ++i) {
      round(counter, k0, k1);
      k0 += kWeylA;
      k1 += kWeylB;
    }
    return counter;
  }
};

inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
  // 53-bit uniform strictly inside (0, 1)
  std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Two independent standard normals for stream (path, step, block).
// Consecutive mode indices share a block in pairs: the normal for mode k is
// normal_pair(seed, path, step, k/2)[k%2], which is what makes noise
// increments identical across Galerkin cutoffs for the shared mode prefix.
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t path,
                                         std::uint64_t step,
                                         std::uint32_t block) {
  std::array<std::uint32_t, 4> ctr = {
      block, static_cast<std::uint32_t>(step),
      static_cast<std::uint32_t>(step >> 32),
      static_cast<std::uint32_t>(path)};
  // High path bits fold into the key so 2^32+ paths stay distinct.
  std::uint64_t key = seed ^ (path >> 32) * 0x9E3779B97F4A7C15ull;
  auto r = Philox4x32::block(ctr, key);
  double u1 = to_unit_open(r[0], r[1]);
  double u2 = to_unit_open(r[2], r[3]);
  double rad = std::sqrt(-2.0 * std::log(u1));
  double ang = 6.283185307179586476925287 * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

// Stateless scalar derivation for auxiliary sampling (Monte Carlo smoothing
// integrals etc.); domain-separated from the path streams by the step tag.
inline double normal_scalar(std::uint64_t seed, std::uint64_t index,
                            std::uint32_t slot) {
  auto z = normal_pair(seed, index, 0x5eed5afe00000000ull + slot, slot);
  return z[0];
}

inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t domain) {
  // splitmix64 step
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (domain + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace spde::rng
