#include <cmath>
#include <vector>

#include "doctest.h"
#include "flatsim/common.hpp"
#include "flatsim/rng.hpp"
#include "flatsim/stats.hpp"

TEST_CASE("mean, variance, and standard error on a known sample") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(flatsim::mean(v) == doctest::Approx(2.5));
  CHECK(flatsim::sample_variance(v) == doctest::Approx(5.0 / 3.0));
  CHECK(flatsim::standard_error(v) == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK_THROWS_AS(flatsim::mean(std::vector<double>{}), flatsim::ValidationError);
  CHECK_THROWS_AS(flatsim::sample_variance(std::vector<double>{1.0}),
                  flatsim::ValidationError);
}

TEST_CASE("excess kurtosis of a two-point distribution is -2") {
  const std::vector<double> v{-1.0, 1.0, -1.0, 1.0, -1.0, 1.0};
  CHECK(flatsim::excess_kurtosis(v) == doctest::Approx(-2.0));
}

TEST_CASE("percentile interpolates between order statistics") {
  const std::vector<double> v{30.0, 10.0, 40.0, 20.0};
  CHECK(flatsim::percentile(v, 0.0) == doctest::Approx(10.0));
  CHECK(flatsim::percentile(v, 1.0) == doctest::Approx(40.0));
  CHECK(flatsim::percentile(v, 0.5) == doctest::Approx(25.0));
  CHECK(flatsim::percentile(v, 0.25) == doctest::Approx(17.5));
  CHECK_THROWS_AS(flatsim::percentile(v, 1.5), flatsim::ValidationError);
}

TEST_CASE("line fit recovers exact affine data") {
  std::vector<double> y(17);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 3.0 + 2.0 * static_cast<double>(i);
  const auto fit = flatsim::fit_line(y);
  CHECK(fit.intercept == doctest::Approx(3.0));
  CHECK(fit.slope == doctest::Approx(2.0));
}

TEST_CASE("sign changes skip zeros") {
  const std::vector<double> v{1.0, -1.0, 0.0, -1.0, 2.0};
  CHECK(flatsim::sign_changes(v) == 2);
  const std::vector<double> w{0.0, 0.0, 5.0};
  CHECK(flatsim::sign_changes(w) == 0);
  const std::vector<double> u{-1.0, 0.0, 1.0, 0.0, -1.0};
  CHECK(flatsim::sign_changes(u) == 2);
}

TEST_CASE("spearman correlation on monotone, reversed, and tied data") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> up{2.0, 7.0, 9.0, 20.0, 21.0};
  std::vector<double> down(up.rbegin(), up.rend());
  CHECK(flatsim::spearman_rho(x, up) == doctest::Approx(1.0));
  CHECK(flatsim::spearman_rho(x, down) == doctest::Approx(-1.0));

  const std::vector<double> tx{1.0, 2.0, 2.0, 3.0};
  const std::vector<double> ty{1.0, 2.0, 3.0, 4.0};
  CHECK(flatsim::spearman_rho(tx, ty) == doctest::Approx(3.0 / std::sqrt(10.0)));
}

TEST_CASE("permutation p-value separates monotone from shuffled data") {
  std::vector<double> x(12), y(12), z(12);
  flatsim::RngStream rng(8, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<double>(i);
    y[i] = static_cast<double>(i) + 0.01 * rng.normal();
    z[i] = rng.normal();
  }
  const double p_mono = flatsim::spearman_pvalue_greater(x, y, 999, 5);
  const double p_null = flatsim::spearman_pvalue_greater(x, z, 999, 5);
  CHECK(p_mono < 0.01);
  CHECK(p_null > 0.05);
  // Deterministic under a fixed seed.
  CHECK(flatsim::spearman_pvalue_greater(x, y, 999, 5) == p_mono);
}

TEST_CASE("paired t statistic on a known sample") {
  const std::vector<double> d{1.0, 1.0, 1.0, 2.0};
  CHECK(flatsim::t_statistic(d) == doctest::Approx(5.0));
  CHECK_THROWS_AS(flatsim::t_statistic(std::vector<double>{1.0, 1.0}),
                  flatsim::ValidationError);
}
