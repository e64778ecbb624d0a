#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace flatsim {

/// Rejected configuration or violated precondition; raised before any state is touched.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical fault while a simulation is running (non-finite drift or state).
class SimulationFault : public std::runtime_error {
 public:
  explicit SimulationFault(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace flatsim
