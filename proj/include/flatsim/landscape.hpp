#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace flatsim {

/// One non-normalized Gaussian bump: amplitude * exp(-||x-center||^2 / (2 width^2)).
struct GaussianWell {
  std::vector<double> center;
  double width = 1.0;      // standard deviation of the bump
  double amplitude = 1.0;  // peak height
};

/// Smooth multi-peak objective built from Gaussian bumps. Learners maximize it;
/// escape analyses treat f = -value as the potential.
class Landscape {
 public:
  explicit Landscape(std::vector<GaussianWell> wells);

  int dimension() const { return dim_; }
  std::size_t well_count() const { return wells_.size(); }
  const GaussianWell& well(std::size_t i) const { return wells_[i]; }

  double value(std::span<const double> x) const;

  void gradient(std::span<const double> x, std::span<double> out) const;
  std::vector<double> gradient(std::span<const double> x) const;

  /// Index of the well whose width-vicinity contains x (||x-c_j|| <= width_j).
  /// Ties break on the smallest normalized distance, then the smallest index.
  std::optional<std::size_t> membership(std::span<const double> x) const;

  /// Largest-width well; ties break on the smallest index.
  std::size_t widest_well() const;

  double min_center_separation() const;
  double max_width() const;

  /// Diagnostic: centers at least 5 widths apart, so vicinity labels are unambiguous.
  bool well_separated() const;

  /// Upper bound for value(): the sum of amplitudes.
  double amplitude_sum() const;

 private:
  std::vector<GaussianWell> wells_;
  int dim_ = 0;
};

}  // namespace flatsim
