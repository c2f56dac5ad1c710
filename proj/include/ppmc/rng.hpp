#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "ppmc/errors.hpp"

namespace ppmc {

/// Seedable, splittable pseudo-random stream with a fixed algorithm
/// (xoshiro256++, seeded through SplitMix64) so that the same
/// (seed, stream_id) produces the same sequence on every platform.
///
/// A stream has a single owner; concurrent chains use distinct stream ids.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    // Golden-ratio offset separates streams before SplitMix64 whitening.
    std::uint64_t sm = seed + stream_id * 0x9e3779b97f4a7c15ULL;
    for (auto& word : state_) word = splitmix64(sm);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// xoshiro256++ step.
  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform draw in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_;
};

/// Draw from N(mu, sigma^2) by Box-Muller. Always consumes exactly two
/// uniforms, so rng state advances the same way regardless of sigma.
inline double sample_normal(RngStream& rng, double mu, double sigma) {
  if (sigma < 0) throw DomainError("sample_normal: sigma < 0");
  const double u1 = 1.0 - rng.uniform();  // (0, 1], keeps log finite
  const double u2 = rng.uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return mu + sigma * radius * std::cos(2.0 * std::numbers::pi * u2);
}

/// True with probability p.
inline bool sample_bernoulli(RngStream& rng, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sample_bernoulli: p outside [0,1]");
  return rng.uniform() < p;
}

/// Uniform integer in [0, n).
inline std::int64_t sample_uniform_int(RngStream& rng, std::int64_t n) {
  if (n <= 0) throw DomainError("sample_uniform_int: n <= 0");
  return static_cast<std::int64_t>(
      (static_cast<unsigned __int128>(rng.next_u64()) *
       static_cast<unsigned __int128>(n)) >> 64);
}

}  // namespace ppmc
