#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace srp::mc {

/// Philox4x32-10 (Salmon et al., SC'11) used as a counter-based stream:
/// the key is derived from the run seed and the counter is
/// (block_lo, block_hi, stream_lo, stream_hi). Every path owns one stream, so
/// its draws do not depend on how paths are scheduled across threads.
class PhiloxStream {
public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t first_block = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream),
        block_(first_block) {}

  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMulA = 0xD2511F53u, kMulB = 0xCD9E8D57u;
    constexpr std::uint32_t kWeylA = 0x9E3779B9u, kWeylB = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    return ctr;
  }

  std::array<std::uint32_t, 4> next_block() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    ++block_;
    return philox(ctr, key_);
  }

  // Two uniforms in the open interval (0, 1), 53 bits each.
  std::array<double, 2> uniform_pair() {
    const auto r = next_block();
    return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
  }

  double uniform() {
    if (has_spare_uniform_) {
      has_spare_uniform_ = false;
      return spare_uniform_;
    }
    const auto u = uniform_pair();
    spare_uniform_ = u[1];
    has_spare_uniform_ = true;
    return u[0];
  }

  // Standard normal via Box-Muller; one Philox block yields two variates.
  double normal() {
    if (has_spare_normal_) {
      has_spare_normal_ = false;
      return spare_normal_;
    }
    const auto u = uniform_pair();
    const double radius = std::sqrt(-2.0 * std::log(u[0]));
    const double angle = 6.283185307179586476925286766559 * u[1];
    spare_normal_ = radius * std::sin(angle);
    has_spare_normal_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t block() const { return block_; }

private:
  static double to_unit(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(a) << 32) | b) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_;
  double spare_normal_ = 0.0, spare_uniform_ = 0.0;
  bool has_spare_normal_ = false, has_spare_uniform_ = false;
};

// splitmix64 finalizer, used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace srp::mc
