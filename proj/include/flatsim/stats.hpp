#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flatsim {

double mean(std::span<const double> v);

/// Unbiased sample variance (n-1 denominator); needs n >= 2.
double sample_variance(std::span<const double> v);

/// Standard error of the sample mean.
double standard_error(std::span<const double> v);

/// Excess kurtosis (0 for a normal population).
double excess_kurtosis(std::span<const double> v);

/// Linear-interpolated percentile, q in [0, 1]; input need not be sorted.
double percentile(std::span<const double> v, double q);

/// Least-squares line y ~ a + b*i over indices 0..n-1; returns {intercept, slope}.
struct LineFit {
  double intercept;
  double slope;
};
LineFit fit_line(std::span<const double> y);

/// Number of strict sign changes, ignoring zero entries.
int sign_changes(std::span<const double> v);

/// Spearman rank correlation (average ranks on ties).
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// One-sided Monte-Carlo permutation p-value for spearman_rho(x, y) > 0.
/// Deterministic under a fixed seed; p = (1 + #{rho_perm >= rho}) / (1 + reps).
double spearman_pvalue_greater(std::span<const double> x, std::span<const double> y,
                               int reps, std::uint64_t seed);

/// Paired t statistic of the differences (mean / standard error); needs n >= 2.
double t_statistic(std::span<const double> diffs);

}  // namespace flatsim
