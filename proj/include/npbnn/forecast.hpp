#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "npbnn/mlp.hpp"

namespace npbnn {

using OneStepMap = std::function<double(std::span<const double>)>;

/// Iterated multi-step forecast. `lag_state` holds the rho most recent
/// observations, most recent first; each prediction is pushed to the front
/// of the lag vector before the next step.
std::vector<double> iterate_path(const OneStepMap& one_step, std::span<const double> lag_state, int horizon);

struct ForecastResult {
  int horizon = 0;
  Eigen::MatrixXd per_sample_paths;  // samples x horizon
  Eigen::VectorXd mean_path;
  /// Column-wise sample standard deviation (zero with a single sample).
  Eigen::VectorXd mc_std;
};

/// Plugs every posterior theta sample into the network and iterates it from
/// `lag_state`; averages the paths.
ForecastResult forecast(std::span<const Eigen::VectorXd> theta_samples, const NetSpec& spec,
                        std::span<const double> lag_state, int horizon);

struct MetricsReport {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  /// Empty when some actual value is zero.
  std::optional<double> mape_percent;
  double theil_u = 0.0;
  /// Horizons (0-based) whose actual value is small enough to make the
  /// MAPE term unstable: |y| < 0.1 * RMS(y).
  std::vector<std::size_t> small_denominators;
};

MetricsReport metrics(std::span<const double> predicted, std::span<const double> actual);

}  // namespace npbnn
