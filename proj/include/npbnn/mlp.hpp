#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "npbnn/dataio.hpp"
#include "npbnn/rng.hpp"

namespace npbnn {

/// Layer widths [N0, N1, ..., NL]; tanh hidden units, one linear output.
struct NetSpec {
  std::vector<int> layer_sizes;

  void validate() const;
  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int input_size() const { return layer_sizes.front(); }
  /// 2L: weights and biases of every layer.
  int num_groups() const { return 2 * num_layers(); }
  Eigen::Index num_params() const;
};

/// Half-open range [offset, offset + size) of one parameter group inside
/// the flat parameter vector.
struct GroupRange {
  Eigen::Index offset = 0;
  Eigen::Index size = 0;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Network parameters stored as one flat vector. Layer l (1-based) occupies
/// group 2(l-1) for W(l) (row-major, N_l x N_{l-1}) followed by group
/// 2(l-1)+1 for b(l).
class NetParams {
 public:
  NetParams() = default;
  explicit NetParams(NetSpec spec);  // all zeros
  NetParams(NetSpec spec, Eigen::VectorXd flat);

  static NetParams from_layers(NetSpec spec, const std::vector<RowMatrix>& weights,
                               const std::vector<Eigen::VectorXd>& biases);

  const NetSpec& spec() const { return spec_; }
  const Eigen::VectorXd& flat() const { return flat_; }
  Eigen::VectorXd& flat() { return flat_; }

  GroupRange group(int g) const { return groups_.at(static_cast<std::size_t>(g)); }
  Eigen::Map<const RowMatrix> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

 private:
  NetSpec spec_;
  Eigen::VectorXd flat_;
  std::vector<GroupRange> groups_;
};

/// Layout of the flat vector for `spec`, one entry per group.
std::vector<GroupRange> group_layout(const NetSpec& spec);

/// Prior precisions, one per group (same indexing as NetParams groups).
struct PrecisionGroups {
  std::vector<double> tau;

  double weight(int layer) const { return tau.at(static_cast<std::size_t>(2 * (layer - 1))); }
  double bias(int layer) const { return tau.at(static_cast<std::size_t>(2 * (layer - 1) + 1)); }
  void validate(const NetSpec& spec) const;
};

double forward(const NetParams& params, std::span<const double> x);

/// Network output for every row of `inputs`.
Eigen::VectorXd forward_batch(const NetParams& params, const Eigen::MatrixXd& inputs);

/// Negative log of the theta full conditional, up to a constant:
///   sum_g tau_g |theta_g|^2 / 2 + sum_t Lambda_t (y_t - g(x_t))^2 / 2.
/// `cluster_precisions` holds the precision of the cluster each datum is in.
double potential(const NetParams& params, const PrecisionGroups& precisions, const LagDataset& data,
                 std::span<const double> cluster_precisions);

Eigen::VectorXd potential_grad(const NetParams& params, const PrecisionGroups& precisions,
                               const LagDataset& data, std::span<const double> cluster_precisions);

/// Potential and gradient from a single forward/backward pass.
double potential_and_grad(const NetParams& params, const PrecisionGroups& precisions, const LagDataset& data,
                          std::span<const double> cluster_precisions, Eigen::VectorXd& grad);

struct CovarianceEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of Cov(g(x), g(x')) under the prior of a
/// one-hidden-layer tanh network of width `hidden_width`: hidden weights
/// N(0, sigma_w^2), hidden biases N(0, sigma_b^2), output weights
/// N(0, sigma_w^2 / width), output bias N(0, sigma_b^2).
CovarianceEstimate prior_output_covariance_probe(RngStream& rng, int hidden_width, double sigma_w, double sigma_b,
                                                 std::span<const double> x, std::span<const double> x_prime,
                                                 int n_draws);

}  // namespace npbnn
