#pragma once

// Counter-based random number generation (Philox4x32-10) with explicit
// stream derivation. Every consumer owns an RngStream keyed by
// (seed, stream id); streams with distinct ids are statistically
// independent and can be advanced on different threads without
// coordination. Replicate-level parallelism derives one stream per
// replicate index, so results do not depend on the thread schedule.

#include <array>
#include <cmath>
#include <cstdint>

namespace seqreg {

struct Philox4x32 {
  // One 10-round block: 128 bits of output from (key, counter).
  static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                            const std::array<std::uint32_t, 4>& ctr) {
    constexpr std::uint32_t M0 = 0xD2511F53u;
    constexpr std::uint32_t M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    std::array<std::uint32_t, 4> c = ctr;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += W0;
        k1 += W1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    }
    return c;
  }
};

// Sequential view of one Philox stream. The 128-bit counter is split as
// (block index, stream id); the key is the master seed. Copyable, cheap.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() {
    if (!have_half_) {
      const std::array<std::uint32_t, 4> c = {
          static_cast<std::uint32_t>(block_),
          static_cast<std::uint32_t>(block_ >> 32),
          static_cast<std::uint32_t>(stream_),
          static_cast<std::uint32_t>(stream_ >> 32)};
      const auto out = Philox4x32::block(seed_, c);
      ++block_;
      half_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
      have_half_ = true;
      return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }
    have_half_ = false;
    return half_;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe under log().
  double next_double_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; pairs are buffered.
  double next_normal() {
    if (have_normal_) {
      have_normal_ = false;
      return spare_normal_;
    }
    const double u1 = next_double_pos();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    spare_normal_ = r * std::sin(two_pi * u2);
    have_normal_ = true;
    return r * std::cos(two_pi * u2);
  }

  double next_uniform(double a, double b) { return a + (b - a) * next_double(); }

  double next_exponential(double rate) { return -std::log(next_double_pos()) / rate; }

  // Marsaglia-Tsang; alpha < 1 goes through the boost Gamma(alpha+1) * U^(1/alpha).
  double next_gamma(double shape, double rate) {
    if (shape < 1.0) {
      const double u = next_double_pos();
      return next_gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = next_normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = next_double_pos();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v / rate;
      }
    }
  }

  bool next_sign() { return (next_u64() & 1u) != 0; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::uint64_t half_ = 0;
  bool have_half_ = false;
  bool have_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace seqreg
