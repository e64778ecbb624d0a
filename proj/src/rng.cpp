#include "flatsim/rng.hpp"

#include <cmath>

#include "flatsim/common.hpp"

namespace flatsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  // Mix seed and stream id so nearby pairs land far apart in engine state space.
  const std::uint64_t s = splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51a9b2c3d4e5f607ULL));
  engine_.seed(s);
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

void RngStream::fill_normal(std::span<double> out) {
  for (double& x : out) x = normal();
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  require(n >= 1, "uniform_below: n must be >= 1");
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(engine_()) * n) >> 64);
}

}  // namespace flatsim
