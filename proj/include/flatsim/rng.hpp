#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace flatsim {

/// Seeded random stream. Identical (seed, stream) pairs reproduce identical draw
/// sequences: the engine (mt19937_64) and every transform below are fully
/// specified, with no reliance on implementation-defined distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller; the second member of each pair is cached.
  double normal();

  void fill_normal(std::span<double> out);

  /// Uniform integer in [0, n), n >= 1. Multiply-shift reduction (deterministic).
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace flatsim
