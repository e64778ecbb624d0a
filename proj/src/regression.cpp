#include "flatsim/regression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "flatsim/common.hpp"
#include "flatsim/rng.hpp"

namespace flatsim {
namespace {

std::string schema_header() {
  std::string h;
  for (int i = 1; i <= kFeatureCount; ++i) h += "f" + std::to_string(i) + ",";
  return h + "class";
}

double parse_field(const std::string& token, std::size_t line_no, int column) {
  const std::string where =
      "line " + std::to_string(line_no) + ", column " + std::to_string(column);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(token, &used);
    require(used == token.size(), where + ": trailing characters in '" + token + "'");
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError(where + ": not a number: '" + token + "'");
  }
  require(std::isfinite(value), where + ": value is not finite");
  return value;
}

}  // namespace

void TabularDataset::validate() const {
  require(features.size() == targets.size(), "feature and target counts differ");
  require(!features.empty(), "dataset has no rows");
  for (const auto& row : features)
    require(all_finite(row), "dataset contains a non-finite feature");
  for (int t : targets)
    require(t >= 0 && t < kClassCount, "class target outside [0, 3)");
}

TabularDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open dataset file: " + path);

  TabularDataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line == schema_header()) continue;

    std::vector<std::string> tokens;
    std::stringstream fields(line);
    std::string token;
    while (std::getline(fields, token, ',')) tokens.push_back(token);
    if (!line.empty() && line.back() == ',') tokens.push_back("");
    require(tokens.size() == kFeatureCount + 1,
            "line " + std::to_string(line_no) + ": expected " +
                std::to_string(kFeatureCount + 1) + " fields, found " +
                std::to_string(tokens.size()));

    std::array<double, kFeatureCount> row;
    for (int i = 0; i < kFeatureCount; ++i) row[i] = parse_field(tokens[i], line_no, i + 1);
    const double label = parse_field(tokens[kFeatureCount], line_no, kFeatureCount + 1);
    require(label == 0.0 || label == 1.0 || label == 2.0,
            "line " + std::to_string(line_no) + ": class target must be 0, 1, or 2");
    const int target = static_cast<int>(label);

    data.features.push_back(row);
    data.targets.push_back(target);
  }
  require(!data.features.empty(), "dataset file has no data rows: " + path);
  data.validate();
  return data;
}

DatasetSplit split_dataset(const TabularDataset& data, double train_fraction,
                           std::uint64_t seed) {
  data.validate();
  require(std::isfinite(train_fraction) && train_fraction > 0.0 && train_fraction < 1.0,
          "train_fraction must lie strictly between 0 and 1");
  const std::size_t n = data.rows();
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * n));
  require(n_train >= 1 && n_train < n, "split would leave an empty side");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rng(seed, 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_below(i + 1);
    std::swap(order[i], order[j]);
  }

  DatasetSplit out;
  for (std::size_t k = 0; k < n; ++k) {
    TabularDataset& side = k < n_train ? out.train : out.test;
    side.features.push_back(data.features[order[k]]);
    side.targets.push_back(data.targets[order[k]]);
  }
  return out;
}

int expansion_size(int degree) {
  require(degree == 1 || degree == 2, "degree must be 1 or 2");
  return degree == 1 ? 1 + kFeatureCount
                     : 1 + kFeatureCount + kFeatureCount * (kFeatureCount + 1) / 2;
}

std::vector<double> expand_row(const std::array<double, kFeatureCount>& x, int degree) {
  std::vector<double> out;
  out.reserve(expansion_size(degree));
  out.push_back(1.0);
  for (double v : x) out.push_back(v);
  if (degree == 2)
    for (int i = 0; i < kFeatureCount; ++i)
      for (int j = i; j < kFeatureCount; ++j) out.push_back(x[i] * x[j]);
  return out;
}

void RegressionModel::validate() const {
  const auto p = static_cast<std::size_t>(expansion_size(degree));
  require(coefficients.size() == p && column_mean.size() == p && column_scale.size() == p,
          "model vectors must match the expansion size");
  require(all_finite(coefficients) && all_finite(column_mean) && all_finite(column_scale),
          "model contains a non-finite entry");
  for (double s : column_scale) require(s > 0.0, "column scales must be positive");
}

RegressionModel initial_model(int degree, const TabularDataset& train) {
  train.validate();
  const auto p = static_cast<std::size_t>(expansion_size(degree));
  RegressionModel model;
  model.degree = degree;
  model.coefficients.assign(p, 0.0);
  model.column_mean.assign(p, 0.0);
  model.column_scale.assign(p, 1.0);

  const std::size_t n = train.rows();
  std::vector<std::vector<double>> expanded;
  expanded.reserve(n);
  for (const auto& row : train.features) expanded.push_back(expand_row(row, degree));

  for (std::size_t j = 1; j < p; ++j) {  // intercept keeps mean 0, scale 1
    double mean_j = 0.0;
    for (const auto& row : expanded) mean_j += row[j];
    mean_j /= static_cast<double>(n);
    double var_j = 0.0;
    for (const auto& row : expanded) {
      const double d = row[j] - mean_j;
      var_j += d * d;
    }
    const double sd = std::sqrt(var_j / static_cast<double>(n));
    model.column_mean[j] = mean_j;
    model.column_scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return model;
}

namespace {

/// Standardized design matrix (row-major) with its target vector.
struct Design {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> x;
  std::vector<double> y;
};

Design build_design(const RegressionModel& model, const TabularDataset& data) {
  Design d;
  d.n = data.rows();
  d.p = model.coefficients.size();
  d.x.reserve(d.n * d.p);
  d.y.reserve(d.n);
  for (std::size_t i = 0; i < d.n; ++i) {
    const std::vector<double> raw = expand_row(data.features[i], model.degree);
    for (std::size_t j = 0; j < d.p; ++j)
      d.x.push_back((raw[j] - model.column_mean[j]) / model.column_scale[j]);
    d.y.push_back(static_cast<double>(data.targets[i]));
  }
  return d;
}

/// MSE at w; also leaves the residuals X w - y in `resid`.
double mse_at(const Design& d, std::span<const double> w, std::vector<double>& resid) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) {
    double r = -d.y[i];
    const double* row = d.x.data() + i * d.p;
    for (std::size_t j = 0; j < d.p; ++j) r += row[j] * w[j];
    resid[i] = r;
    acc += r * r;
  }
  return acc / static_cast<double>(d.n);
}

/// Gradient (2/n) X^T resid of the MSE.
void mse_gradient(const Design& d, std::span<const double> resid, std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t i = 0; i < d.n; ++i) {
    const double* row = d.x.data() + i * d.p;
    for (std::size_t j = 0; j < d.p; ++j) grad[j] += resid[i] * row[j];
  }
  const double scale = 2.0 / static_cast<double>(d.n);
  for (std::size_t j = 0; j < d.p; ++j) grad[j] *= scale;
}

void check_fit_inputs(const TabularDataset& train, const TabularDataset& test,
                      double step, const char* step_name, int iterations) {
  train.validate();
  test.validate();
  require(std::isfinite(step) && step > 0.0, std::string(step_name) + " must be positive");
  require(iterations >= 0, "iterations must be nonnegative");
}

}  // namespace

double predict(const RegressionModel& model, const std::array<double, kFeatureCount>& x) {
  const std::vector<double> raw = expand_row(x, model.degree);
  double acc = 0.0;
  for (std::size_t j = 0; j < raw.size(); ++j)
    acc += model.coefficients[j] * (raw[j] - model.column_mean[j]) / model.column_scale[j];
  return acc;
}

int predicted_class(double prediction) {
  require(std::isfinite(prediction), "prediction is not finite");
  const long rounded = std::lround(prediction);
  return static_cast<int>(std::clamp(rounded, 0L, static_cast<long>(kClassCount - 1)));
}

Evaluation evaluate(const RegressionModel& model, const TabularDataset& data) {
  model.validate();
  data.validate();
  double se = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double pred = predict(model, data.features[i]);
    const double r = pred - data.targets[i];
    se += r * r;
    if (predicted_class(pred) == data.targets[i]) ++correct;
  }
  const auto n = static_cast<double>(data.rows());
  return {se / n, static_cast<double>(correct) / n};
}

FitResult fit_gd(int degree, const TabularDataset& train, const TabularDataset& test,
                 double learning_rate, int iterations) {
  check_fit_inputs(train, test, learning_rate, "learning_rate", iterations);
  RegressionModel model = initial_model(degree, train);
  const Design dtr = build_design(model, train);
  const Design dte = build_design(model, test);

  std::vector<double> w = model.coefficients;
  std::vector<double> resid_tr(dtr.n), resid_te(dte.n), grad(dtr.p);
  LossCurve curve;
  curve.train.reserve(iterations + 1);
  curve.test.reserve(iterations + 1);
  curve.train.push_back(mse_at(dtr, w, resid_tr));
  curve.test.push_back(mse_at(dte, w, resid_te));

  for (int k = 1; k <= iterations; ++k) {
    mse_gradient(dtr, resid_tr, grad);
    for (std::size_t j = 0; j < dtr.p; ++j) w[j] += learning_rate * -grad[j];
    const double tr = mse_at(dtr, w, resid_tr);
    const double te = mse_at(dte, w, resid_te);
    if (!std::isfinite(tr) || !std::isfinite(te))
      throw SimulationFault("regression fit diverged at iteration " + std::to_string(k));
    curve.train.push_back(tr);
    curve.test.push_back(te);
  }
  model.coefficients = std::move(w);
  return {std::move(model), std::move(curve)};
}

InteractionParams regression_interaction() {
  InteractionParams p;
  p.push_strength = 0.3;
  p.push_range = 0.05;
  p.push_sharpness = 1e3;
  p.yukawa_strength = 0.5;
  p.yukawa_decay = 80.0;
  p.pursuit_speed = 0.15;
  return p;
}

FitResult fit_pp(int degree, const TabularDataset& train, const TabularDataset& test,
                 const InteractionParams& interaction, double dt, int iterations) {
  check_fit_inputs(train, test, dt, "dt", iterations);
  interaction.validate();
  RegressionModel model = initial_model(degree, train);
  const Design dtr = build_design(model, train);
  const Design dte = build_design(model, test);
  const std::size_t p = dtr.p;

  std::vector<double> prey = model.coefficients;
  std::vector<double> predator = prey;
  predator[0] += 0.5;
  std::vector<double> resid_tr(dtr.n), resid_te(dte.n), grad(p), delta(p);
  LossCurve curve;
  curve.train.reserve(iterations + 1);
  curve.test.reserve(iterations + 1);
  curve.train.push_back(mse_at(dtr, prey, resid_tr));
  curve.test.push_back(mse_at(dte, prey, resid_te));

  const int window_start = iterations - std::max(1, iterations / 5);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_prey = prey;

  for (int k = 1; k <= iterations; ++k) {
    mse_gradient(dtr, resid_tr, grad);
    for (std::size_t j = 0; j < p; ++j) delta[j] = prey[j] - predator[j];
    const std::vector<double> repel = interaction_force(delta, interaction);
    const std::vector<double> chase = pursuit_force(delta, interaction.pursuit_speed);
    for (std::size_t j = 0; j < p; ++j) prey[j] += dt * (-grad[j] + repel[j]);
    for (std::size_t j = 0; j < p; ++j) predator[j] += dt * chase[j];
    const double tr = mse_at(dtr, prey, resid_tr);
    const double te = mse_at(dte, prey, resid_te);
    if (!std::isfinite(tr) || !std::isfinite(te))
      throw SimulationFault("regression fit diverged at iteration " + std::to_string(k));
    curve.train.push_back(tr);
    curve.test.push_back(te);
    if (k > window_start && tr < best) {
      best = tr;
      best_prey = prey;
    }
  }
  model.coefficients = std::move(best_prey);
  return {std::move(model), std::move(curve)};
}

void FitReport::validate() const {
  require(!method.empty(), "report method must be named");
  require(std::isfinite(train_mse) && train_mse >= 0.0, "train_mse must be finite and >= 0");
  require(std::isfinite(test_mse) && test_mse >= 0.0, "test_mse must be finite and >= 0");
  require(test_accuracy >= 0.0 && test_accuracy <= 1.0, "test_accuracy must lie in [0, 1]");
  require(iterations >= 0, "iterations must be nonnegative");
}

FitReport summarize_fit(const std::string& method, const FitResult& fit,
                        const TabularDataset& train, const TabularDataset& test,
                        std::int64_t iterations, const std::string& config) {
  const Evaluation on_train = evaluate(fit.model, train);
  const Evaluation on_test = evaluate(fit.model, test);
  FitReport report;
  report.method = method;
  report.train_mse = on_train.mse;
  report.test_mse = on_test.mse;
  report.test_accuracy = on_test.accuracy;
  report.iterations = iterations;
  report.config = config;
  report.validate();
  return report;
}

}  // namespace flatsim
