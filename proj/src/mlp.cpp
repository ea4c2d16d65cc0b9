#include "npbnn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace npbnn {

void NetSpec::validate() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("NetSpec: need at least input and output layers");
  for (int n : layer_sizes) {
    if (n < 1) throw std::invalid_argument("NetSpec: layer sizes must be >= 1");
  }
  if (layer_sizes.back() != 1) throw std::invalid_argument("NetSpec: output layer must have size 1");
}

Eigen::Index NetSpec::num_params() const {
  Eigen::Index p = 0;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    p += static_cast<Eigen::Index>(layer_sizes[l]) * layer_sizes[l - 1] + layer_sizes[l];
  }
  return p;
}

std::vector<GroupRange> group_layout(const NetSpec& spec) {
  std::vector<GroupRange> out;
  Eigen::Index offset = 0;
  for (std::size_t l = 1; l < spec.layer_sizes.size(); ++l) {
    const Eigen::Index w = static_cast<Eigen::Index>(spec.layer_sizes[l]) * spec.layer_sizes[l - 1];
    out.push_back({offset, w});
    offset += w;
    out.push_back({offset, spec.layer_sizes[l]});
    offset += spec.layer_sizes[l];
  }
  return out;
}

NetParams::NetParams(NetSpec spec) : NetParams(spec, Eigen::VectorXd::Zero(spec.num_params())) {}

NetParams::NetParams(NetSpec spec, Eigen::VectorXd flat) : spec_(std::move(spec)), flat_(std::move(flat)) {
  spec_.validate();
  if (flat_.size() != spec_.num_params()) throw std::invalid_argument("NetParams: flat vector has wrong length");
  groups_ = group_layout(spec_);
}

NetParams NetParams::from_layers(NetSpec spec, const std::vector<RowMatrix>& weights,
                                 const std::vector<Eigen::VectorXd>& biases) {
  NetParams p(std::move(spec));
  const int layers = p.spec().num_layers();
  if (static_cast<int>(weights.size()) != layers || static_cast<int>(biases.size()) != layers) {
    throw std::invalid_argument("NetParams::from_layers: wrong number of layers");
  }
  for (int l = 1; l <= layers; ++l) {
    const auto& w = weights[static_cast<std::size_t>(l - 1)];
    const auto& b = biases[static_cast<std::size_t>(l - 1)];
    const int rows = p.spec().layer_sizes[static_cast<std::size_t>(l)];
    const int cols = p.spec().layer_sizes[static_cast<std::size_t>(l - 1)];
    if (w.rows() != rows || w.cols() != cols || b.size() != rows) {
      throw std::invalid_argument("NetParams::from_layers: shape mismatch in layer " + std::to_string(l));
    }
    const GroupRange wg = p.group(2 * (l - 1));
    const GroupRange bg = p.group(2 * (l - 1) + 1);
    Eigen::Map<RowMatrix>(p.flat_.data() + wg.offset, rows, cols) = w;
    p.flat_.segment(bg.offset, bg.size) = b;
  }
  return p;
}

Eigen::Map<const RowMatrix> NetParams::weight(int layer) const {
  const GroupRange g = group(2 * (layer - 1));
  return {flat_.data() + g.offset, spec_.layer_sizes[static_cast<std::size_t>(layer)],
          spec_.layer_sizes[static_cast<std::size_t>(layer - 1)]};
}

Eigen::Map<const Eigen::VectorXd> NetParams::bias(int layer) const {
  const GroupRange g = group(2 * (layer - 1) + 1);
  return {flat_.data() + g.offset, g.size};
}

void PrecisionGroups::validate(const NetSpec& spec) const {
  if (static_cast<int>(tau.size()) != spec.num_groups()) {
    throw std::invalid_argument("PrecisionGroups: expected one precision per parameter group");
  }
  for (double t : tau) {
    if (!(t > 0.0)) throw std::invalid_argument("PrecisionGroups: precisions must be positive");
  }
}

double forward(const NetParams& params, std::span<const double> x) {
  const NetSpec& spec = params.spec();
  if (static_cast<int>(x.size()) != spec.input_size()) {
    throw std::invalid_argument("forward: input has length " + std::to_string(x.size()) + ", expected " +
                                std::to_string(spec.input_size()));
  }
  Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  const int layers = spec.num_layers();
  for (int l = 1; l <= layers; ++l) {
    Eigen::VectorXd a = params.weight(l) * h + params.bias(l);
    h = (l < layers) ? Eigen::VectorXd(a.array().tanh()) : a;
  }
  return h(0);
}

namespace {

// Activations per layer, each N_l x n (column t is datum t).
std::vector<Eigen::MatrixXd> forward_activations(const NetParams& params, const Eigen::MatrixXd& inputs) {
  const NetSpec& spec = params.spec();
  if (inputs.cols() != spec.input_size()) throw std::invalid_argument("forward_batch: input width mismatch");
  const int layers = spec.num_layers();
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(static_cast<std::size_t>(layers) + 1);
  acts.push_back(inputs.transpose());
  for (int l = 1; l <= layers; ++l) {
    Eigen::MatrixXd a = params.weight(l) * acts.back();
    a.colwise() += params.bias(l);
    if (l < layers) a = a.array().tanh().matrix();
    acts.push_back(std::move(a));
  }
  return acts;
}

void check_likelihood_args(const NetParams& params, const PrecisionGroups& precisions, const LagDataset& data,
                           std::span<const double> cluster_precisions) {
  precisions.validate(params.spec());
  if (data.rows() == 0) throw std::invalid_argument("potential: empty dataset");
  if (static_cast<Eigen::Index>(cluster_precisions.size()) != data.rows()) {
    throw std::invalid_argument("potential: need one cluster precision per datum");
  }
  for (double lam : cluster_precisions) {
    if (!(lam > 0.0)) throw std::invalid_argument("potential: cluster precisions must be positive");
  }
}

double prior_term(const NetParams& params, const PrecisionGroups& precisions) {
  double u = 0.0;
  for (int g = 0; g < params.spec().num_groups(); ++g) {
    const GroupRange r = params.group(g);
    u += 0.5 * precisions.tau[static_cast<std::size_t>(g)] * params.flat().segment(r.offset, r.size).squaredNorm();
  }
  return u;
}

}  // namespace

Eigen::VectorXd forward_batch(const NetParams& params, const Eigen::MatrixXd& inputs) {
  return forward_activations(params, inputs).back().row(0).transpose();
}

double potential(const NetParams& params, const PrecisionGroups& precisions, const LagDataset& data,
                 std::span<const double> cluster_precisions) {
  check_likelihood_args(params, precisions, data, cluster_precisions);
  const Eigen::VectorXd g = forward_batch(params, data.inputs);
  const Eigen::Map<const Eigen::VectorXd> lam(cluster_precisions.data(), data.rows());
  return prior_term(params, precisions) + 0.5 * (lam.array() * (data.targets - g).array().square()).sum();
}

double potential_and_grad(const NetParams& params, const PrecisionGroups& precisions, const LagDataset& data,
                          std::span<const double> cluster_precisions, Eigen::VectorXd& grad) {
  check_likelihood_args(params, precisions, data, cluster_precisions);
  const NetSpec& spec = params.spec();
  const int layers = spec.num_layers();
  const auto acts = forward_activations(params, data.inputs);
  const Eigen::Map<const Eigen::VectorXd> lam(cluster_precisions.data(), data.rows());

  const Eigen::RowVectorXd resid = acts.back().row(0) - data.targets.transpose();
  double u = prior_term(params, precisions) + 0.5 * (lam.transpose().array() * resid.array().square()).sum();

  grad.resize(spec.num_params());
  for (int g = 0; g < spec.num_groups(); ++g) {
    const GroupRange r = params.group(g);
    grad.segment(r.offset, r.size) = precisions.tau[static_cast<std::size_t>(g)] * params.flat().segment(r.offset, r.size);
  }

  // delta holds dU/da for the current layer, N_l x n.
  Eigen::MatrixXd delta = (lam.transpose().array() * resid.array()).matrix();
  for (int l = layers; l >= 1; --l) {
    const GroupRange wg = params.group(2 * (l - 1));
    const GroupRange bg = params.group(2 * (l - 1) + 1);
    const auto& below = acts[static_cast<std::size_t>(l - 1)];
    Eigen::Map<RowMatrix>(grad.data() + wg.offset, delta.rows(), below.rows()) += delta * below.transpose();
    grad.segment(bg.offset, bg.size) += delta.rowwise().sum();
    if (l > 1) {
      Eigen::MatrixXd back = params.weight(l).transpose() * delta;
      delta = (back.array() * (1.0 - below.array().square())).matrix();
    }
  }
  return u;
}

Eigen::VectorXd potential_grad(const NetParams& params, const PrecisionGroups& precisions, const LagDataset& data,
                               std::span<const double> cluster_precisions) {
  Eigen::VectorXd grad;
  potential_and_grad(params, precisions, data, cluster_precisions, grad);
  return grad;
}

CovarianceEstimate prior_output_covariance_probe(RngStream& rng, int hidden_width, double sigma_w, double sigma_b,
                                                 std::span<const double> x, std::span<const double> x_prime,
                                                 int n_draws) {
  if (hidden_width < 1 || n_draws < 2) throw std::invalid_argument("probe: need width >= 1 and n_draws >= 2");
  if (x.size() != x_prime.size() || x.empty()) throw std::invalid_argument("probe: inputs must have equal length");
  if (sigma_w < 0.0 || sigma_b < 0.0) throw std::invalid_argument("probe: scales must be non-negative");

  const double out_sd = sigma_w / std::sqrt(static_cast<double>(hidden_width));
  std::vector<double> gx(static_cast<std::size_t>(n_draws));
  std::vector<double> gy(static_cast<std::size_t>(n_draws));
  for (int i = 0; i < n_draws; ++i) {
    const double out_bias = sigma_b * draw_std_normal(rng);
    double fx = out_bias;
    double fy = out_bias;
    for (int j = 0; j < hidden_width; ++j) {
      double ax = sigma_b * draw_std_normal(rng);
      double ay = ax;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double w = sigma_w * draw_std_normal(rng);
        ax += w * x[k];
        ay += w * x_prime[k];
      }
      const double v = out_sd * draw_std_normal(rng);
      fx += v * std::tanh(ax);
      fy += v * std::tanh(ay);
    }
    gx[static_cast<std::size_t>(i)] = fx;
    gy[static_cast<std::size_t>(i)] = fy;
  }

  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    mx += gx[static_cast<std::size_t>(i)];
    my += gy[static_cast<std::size_t>(i)];
  }
  mx /= n_draws;
  my /= n_draws;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const double p = (gx[static_cast<std::size_t>(i)] - mx) * (gy[static_cast<std::size_t>(i)] - my);
    s += p;
    s2 += p * p;
  }
  const double n = n_draws;
  const double mean_p = s / n;
  const double var_p = (s2 / n - mean_p * mean_p) * n / (n - 1.0);
  return {s / (n - 1.0), std::sqrt(std::max(var_p, 0.0) / n)};
}

}  // namespace npbnn
