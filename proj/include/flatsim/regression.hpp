#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "flatsim/pursuit.hpp"

namespace flatsim {

inline constexpr int kFeatureCount = 13;
inline constexpr int kClassCount = 3;

/// Rows of numeric features with integer class labels in [0, kClassCount).
struct TabularDataset {
  std::vector<std::array<double, kFeatureCount>> features;
  std::vector<int> targets;

  std::size_t rows() const { return features.size(); }

  /// At least one row, finite features, matching sizes, labels in range.
  void validate() const;
};

/// Loads a CSV with 13 numeric feature columns followed by an integer class
/// column. A first line equal to "f1,f2,...,f13,class" is treated as a header
/// and skipped; every other line must parse, and errors name the 1-based line.
TabularDataset load_dataset(const std::string& path);

struct DatasetSplit {
  TabularDataset train;
  TabularDataset test;
};

/// Seed-deterministic shuffle split: floor(train_fraction * rows) rows go to
/// train, the remainder to test. Both sides must end up non-empty.
DatasetSplit split_dataset(const TabularDataset& data, double train_fraction,
                           std::uint64_t seed);

/// Monomial columns of total degree <= degree over 13 features, counting the
/// intercept: 14 for degree 1, 105 for degree 2.
int expansion_size(int degree);

/// Expansion of one row: [1, x1..x13], then for degree 2 the 91 products
/// x_i * x_j with i <= j in (i, j) order.
std::vector<double> expand_row(const std::array<double, kFeatureCount>& x, int degree);

/// Linear model over the standardized monomial expansion. column_mean and
/// column_scale are frozen training statistics (population standard deviation;
/// constant columns and the intercept keep mean 0 and scale 1).
struct RegressionModel {
  int degree = 1;
  std::vector<double> coefficients;
  std::vector<double> column_mean;
  std::vector<double> column_scale;

  void validate() const;
};

/// Zero-coefficient model whose standardization statistics come from `train`
/// alone; test rows never touch them.
RegressionModel initial_model(int degree, const TabularDataset& train);

/// Raw (unrounded) prediction for one feature row.
double predict(const RegressionModel& model, const std::array<double, kFeatureCount>& x);

/// Class decision for a raw prediction: round half away from zero, then clamp
/// to [0, kClassCount - 1].
int predicted_class(double prediction);

struct Evaluation {
  double mse = 0.0;       // mean squared error of the raw predictions
  double accuracy = 0.0;  // fraction with predicted_class(prediction) == target
};

Evaluation evaluate(const RegressionModel& model, const TabularDataset& data);

/// Losses per iterate; entry 0 is the zero-coefficient start and entry k the
/// state after k updates, so the vectors hold iterations + 1 entries.
struct LossCurve {
  std::vector<double> train;
  std::vector<double> test;
};

struct FitResult {
  RegressionModel model;
  LossCurve curve;
};

/// Full-batch gradient descent on the train MSE, returning the final iterate.
/// A non-finite loss raises SimulationFault naming the failing iteration.
FitResult fit_gd(int degree, const TabularDataset& train, const TabularDataset& test,
                 double learning_rate, int iterations);

/// Interaction rescaled for coefficient space: the repulsion shoulder sits at
/// separation 0.05 instead of 1 with a proportionally tightened core, keeping
/// the plateau and pursuit speed of the trajectory defaults.
InteractionParams regression_interaction();

/// Predator-prey fit: the coefficient vector descends the train MSE while
/// repelled from a predator that starts offset +0.5 along the first
/// coefficient and closes at constant speed. Returns the iterate with the
/// lowest train MSE over the final 20% of iterations, where the pursuit has
/// settled into its steady drift.
FitResult fit_pp(int degree, const TabularDataset& train, const TabularDataset& test,
                 const InteractionParams& interaction, double dt, int iterations);

/// One benchmark row: the method label, losses of the returned model, and the
/// configuration string echoed into reports.
struct FitReport {
  std::string method;
  double train_mse = 0.0;
  double test_mse = 0.0;
  double test_accuracy = 0.0;
  std::int64_t iterations = 0;
  std::string config;

  void validate() const;
};

FitReport summarize_fit(const std::string& method, const FitResult& fit,
                        const TabularDataset& train, const TabularDataset& test,
                        std::int64_t iterations, const std::string& config);

}  // namespace flatsim
