#include "npbnn/forecast.hpp"

#include <cmath>
#include <stdexcept>

namespace npbnn {

std::vector<double> iterate_path(const OneStepMap& one_step, std::span<const double> lag_state, int horizon) {
  if (horizon < 1) throw std::invalid_argument("iterate_path: horizon must be >= 1");
  if (lag_state.empty()) throw std::invalid_argument("iterate_path: empty lag state");
  std::vector<double> lags(lag_state.begin(), lag_state.end());
  std::vector<double> path;
  path.reserve(static_cast<std::size_t>(horizon));
  for (int j = 0; j < horizon; ++j) {
    const double next = one_step(lags);
    path.push_back(next);
    lags.pop_back();
    lags.insert(lags.begin(), next);
  }
  return path;
}

ForecastResult forecast(std::span<const Eigen::VectorXd> theta_samples, const NetSpec& spec,
                        std::span<const double> lag_state, int horizon) {
  if (theta_samples.empty()) throw std::runtime_error("no theta samples stored");
  if (static_cast<int>(lag_state.size()) != spec.input_size()) {
    throw std::invalid_argument("forecast: lag state length must equal the network input size");
  }
  const auto n = static_cast<Eigen::Index>(theta_samples.size());
  ForecastResult out;
  out.horizon = horizon;
  out.per_sample_paths.resize(n, horizon);
  for (Eigen::Index i = 0; i < n; ++i) {
    const NetParams params(spec, theta_samples[static_cast<std::size_t>(i)]);
    const auto path = iterate_path([&](std::span<const double> x) { return forward(params, x); }, lag_state, horizon);
    for (int j = 0; j < horizon; ++j) out.per_sample_paths(i, j) = path[static_cast<std::size_t>(j)];
  }
  out.mean_path = out.per_sample_paths.colwise().mean().transpose();
  out.mc_std = Eigen::VectorXd::Zero(horizon);
  if (n > 1) {
    const Eigen::MatrixXd centered = out.per_sample_paths.rowwise() - out.mean_path.transpose();
    out.mc_std = (centered.array().square().colwise().sum() / static_cast<double>(n - 1)).sqrt().transpose();
  }
  return out;
}

MetricsReport metrics(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size() || predicted.empty()) {
    throw std::invalid_argument("metrics: predicted and actual must have equal, non-zero length");
  }
  const auto J = static_cast<double>(actual.size());
  double se = 0.0, ae = 0.0, ape = 0.0, pred_sq = 0.0, act_sq = 0.0;
  bool mape_defined = true;
  for (std::size_t t = 0; t < actual.size(); ++t) {
    const double e = predicted[t] - actual[t];
    se += e * e;
    ae += std::abs(e);
    pred_sq += predicted[t] * predicted[t];
    act_sq += actual[t] * actual[t];
    if (actual[t] == 0.0) {
      mape_defined = false;
    } else {
      ape += std::abs(e / actual[t]);
    }
  }
  const double denom = std::sqrt(pred_sq / J) + std::sqrt(act_sq / J);
  if (!(denom > 0.0)) throw std::invalid_argument("metrics: Theil's U undefined when both series are all zero");

  MetricsReport r;
  r.mse = se / J;
  r.rmse = std::sqrt(r.mse);
  r.mae = ae / J;
  if (mape_defined) r.mape_percent = 100.0 * ape / J;
  r.theil_u = r.rmse / denom;
  const double rms_actual = std::sqrt(act_sq / J);
  for (std::size_t t = 0; t < actual.size(); ++t) {
    if (std::abs(actual[t]) < 0.1 * rms_actual) r.small_denominators.push_back(t);
  }
  return r;
}

}  // namespace npbnn
