#include "flatsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flatsim/common.hpp"
#include "flatsim/rng.hpp"

namespace flatsim {

double mean(std::span<const double> v) {
  require(!v.empty(), "mean: empty input");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  require(v.size() >= 2, "sample_variance: need at least two points");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double standard_error(std::span<const double> v) {
  return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

double excess_kurtosis(std::span<const double> v) {
  require(v.size() >= 4, "excess_kurtosis: need at least four points");
  const double m = mean(v);
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - m;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(v.size());
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

double percentile(std::span<const double> v, double q) {
  require(!v.empty(), "percentile: empty input");
  require(q >= 0.0 && q <= 1.0, "percentile: q must lie in [0, 1]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double pos = q * static_cast<double>(s.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= s.size()) return s.back();
  const double frac = pos - static_cast<double>(lo);
  return s[lo] * (1.0 - frac) + s[lo + 1] * frac;
}

LineFit fit_line(std::span<const double> y) {
  require(y.size() >= 2, "fit_line: need at least two points");
  const double n = static_cast<double>(y.size());
  const double mx = (n - 1.0) / 2.0;
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dx = static_cast<double>(i) - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

int sign_changes(std::span<const double> v) {
  int changes = 0;
  double prev = 0.0;
  for (double x : v) {
    if (x == 0.0) continue;
    if (prev != 0.0 && ((prev > 0.0) != (x > 0.0))) ++changes;
    prev = x;
  }
  return changes;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  require(sxx > 0.0 && syy > 0.0, "correlation: constant input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 3, "spearman_rho: mismatched or tiny input");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson(rx, ry);
}

double spearman_pvalue_greater(std::span<const double> x, std::span<const double> y,
                               int reps, std::uint64_t seed) {
  require(reps >= 1, "spearman_pvalue_greater: reps must be >= 1");
  const double observed = spearman_rho(x, y);
  auto rx = ranks(x);
  const auto ry = ranks(y);
  RngStream rng(seed, 0);
  int at_least = 0;
  for (int r = 0; r < reps; ++r) {
    // Fisher-Yates shuffle of the x ranks.
    for (std::size_t i = rx.size() - 1; i > 0; --i) {
      const std::size_t j = rng.uniform_below(i + 1);
      std::swap(rx[i], rx[j]);
    }
    if (pearson(rx, ry) >= observed) ++at_least;
  }
  return (1.0 + at_least) / (1.0 + reps);
}

double t_statistic(std::span<const double> diffs) {
  const double se = standard_error(diffs);
  require(se > 0.0, "t_statistic: zero variance");
  return mean(diffs) / se;
}

}  // namespace flatsim
