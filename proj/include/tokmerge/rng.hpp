// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace tokmerge {

/// Deterministic 64-bit generator (splitmix64). Hand-rolled so that seeded
/// runs reproduce bit-exactly regardless of the standard library in use.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Standard normal via Box-Muller; the second deviate is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_unit();  // (0, 1], keeps log() finite
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and up to three
/// component ids (tag, layer, window, timestep, ...). Order-sensitive.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
  std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ull);
  s = mix64(s ^ (a + 0xD1B54A32D192ED03ull));
  s = mix64(s ^ (b + 0x8CB92BA72F3D8DD7ull));
  s = mix64(s ^ (c + 0xEB44ACCAB455D165ull));
  return s;
}

/// Stream ids so the pipeline's independent random draws never collide.
namespace stream_tag {
inline constexpr std::uint64_t tokens = 1;
inline constexpr std::uint64_t projections = 2;
inline constexpr std::uint64_t drift = 3;
inline constexpr std::uint64_t destination = 4;
}  // namespace stream_tag

}  // namespace tokmerge
