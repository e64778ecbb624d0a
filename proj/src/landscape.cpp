#include "flatsim/landscape.hpp"

#include <cmath>
#include <limits>

#include "flatsim/common.hpp"
#include "flatsim/vecmath.hpp"

namespace flatsim {

Landscape::Landscape(std::vector<GaussianWell> wells) : wells_(std::move(wells)) {
  require(!wells_.empty(), "Landscape: at least one well required");
  dim_ = static_cast<int>(wells_.front().center.size());
  require(dim_ >= 1, "Landscape: wells need a nonempty center");
  for (std::size_t j = 0; j < wells_.size(); ++j) {
    const auto& w = wells_[j];
    require(static_cast<int>(w.center.size()) == dim_,
            "Landscape: well " + std::to_string(j) + " has mismatched dimension");
    require(all_finite(w.center), "Landscape: non-finite center");
    require(std::isfinite(w.width) && w.width > 0.0,
            "Landscape: width must be positive and finite");
    require(std::isfinite(w.amplitude) && w.amplitude > 0.0,
            "Landscape: amplitude must be positive and finite");
  }
}

double Landscape::value(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim_, "Landscape::value: dimension mismatch");
  double v = 0.0;
  for (const auto& w : wells_) {
    const double d2 = [&] {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double d = x[i] - w.center[i];
        s += d * d;
      }
      return s;
    }();
    v += w.amplitude * std::exp(-d2 / (2.0 * w.width * w.width));
  }
  return v;
}

void Landscape::gradient(std::span<const double> x, std::span<double> out) const {
  require(static_cast<int>(x.size()) == dim_ && out.size() == x.size(),
          "Landscape::gradient: dimension mismatch");
  for (int i = 0; i < dim_; ++i) out[i] = 0.0;
  for (const auto& w : wells_) {
    double d2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      const double d = x[i] - w.center[i];
      d2 += d * d;
    }
    const double s2 = w.width * w.width;
    const double k = w.amplitude / s2 * std::exp(-d2 / (2.0 * s2));
    for (int i = 0; i < dim_; ++i) out[i] += k * (w.center[i] - x[i]);
  }
}

std::vector<double> Landscape::gradient(std::span<const double> x) const {
  std::vector<double> g(x.size());
  gradient(x, g);
  return g;
}

std::optional<std::size_t> Landscape::membership(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim_, "Landscape::membership: dimension mismatch");
  std::optional<std::size_t> best;
  double best_r = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < wells_.size(); ++j) {
    const double r = l2_dist(x, wells_[j].center) / wells_[j].width;
    if (r <= 1.0 && r < best_r) {
      best = j;
      best_r = r;
    }
  }
  return best;
}

std::size_t Landscape::widest_well() const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < wells_.size(); ++j)
    if (wells_[j].width > wells_[best].width) best = j;
  return best;
}

double Landscape::min_center_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < wells_.size(); ++a)
    for (std::size_t b = a + 1; b < wells_.size(); ++b)
      best = std::min(best, l2_dist(wells_[a].center, wells_[b].center));
  return best;
}

double Landscape::max_width() const {
  double m = 0.0;
  for (const auto& w : wells_) m = std::max(m, w.width);
  return m;
}

bool Landscape::well_separated() const {
  if (wells_.size() < 2) return true;
  return min_center_separation() >= 5.0 * max_width();
}

double Landscape::amplitude_sum() const {
  double s = 0.0;
  for (const auto& w : wells_) s += w.amplitude;
  return s;
}

}  // namespace flatsim
