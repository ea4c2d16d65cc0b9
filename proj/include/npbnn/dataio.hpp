#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "npbnn/rng.hpp"

namespace npbnn {

enum class Transform { None, Log10 };

Transform parse_transform(const std::string& name);
std::string to_string(Transform t);

struct TimeSeries {
  std::vector<double> values;
  std::string name;
  Transform transform = Transform::None;

  std::size_t size() const { return values.size(); }
};

/// Supervised pairs (y_t^rho, y_t). Row i of `inputs` is the lag vector
/// (y_{t-1}, ..., y_{t-rho}) for target y_t, most recent value first.
struct LagDataset {
  int rho = 0;
  Eigen::MatrixXd inputs;               // rows x rho
  Eigen::VectorXd targets;              // rows
  std::vector<double> initial_states;   // first rho raw values, in time order

  Eigen::Index rows() const { return targets.size(); }
};

/// Mixture of zero-mean normals used as dynamical noise in simulations.
/// `std_devs` are standard deviations; zero is accepted (noise-free runs).
struct NoiseMixtureSpec {
  std::vector<double> weights;
  std::vector<double> std_devs;

  void validate() const;
  double draw(RngStream& rng) const;
  double density(double z) const;
};

/// Iterates x_t = 1 - mu x_{t-1}^2 + z_t for t = 1..n starting from x0.
/// The returned series is (x_1, ..., x_n).
TimeSeries simulate_logistic(RngStream& rng, double mu, double x0, int n, const NoiseMixtureSpec& noise);

LagDataset embed(const TimeSeries& series, int rho);

std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, std::size_t n_train);

/// The last rho values of `series`, most recent first: the lag state that
/// seeds a forecast from the end of the series.
std::vector<double> tail_lag_state(const TimeSeries& series, int rho);

/// One value per line, optional non-numeric header on the first line.
TimeSeries load_csv(const std::filesystem::path& path, Transform transform = Transform::None);

/// Writes `header` (if non-empty) then one value per line in shortest
/// round-trip decimal form.
void save_csv(const std::filesystem::path& path, std::span<const double> values, const std::string& header = "");

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace npbnn
