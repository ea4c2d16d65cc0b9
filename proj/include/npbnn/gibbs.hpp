#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "npbnn/dataio.hpp"
#include "npbnn/gsb.hpp"
#include "npbnn/hmc.hpp"
#include "npbnn/mlp.hpp"
#include "npbnn/rng.hpp"

namespace npbnn {

struct ModelHyper {
  GsbHyper gsb;
  /// Gamma hyperprior of each parameter-group precision (2L entries).
  std::vector<GammaPrior> tau;

  static ModelHyper uniform_tau(const GsbHyper& gsb, GammaPrior tau_prior, const NetSpec& spec);
  void validate(const NetSpec& spec) const;
};

/// Nonparametric: the full GSB noise model. Gaussian: a single noise
/// precision (the AR-BNN special case); the mixture steps are skipped.
enum class NoiseModel { Nonparametric, Gaussian };

struct SamplerOptions {
  HmcConfig hmc;
  NoiseModel noise_model = NoiseModel::Nonparametric;
  LabelRule label_rule = LabelRule::SliceUniform;
};

struct ChainState {
  NetParams net;
  PrecisionGroups precisions;
  MixtureState mixture;
  std::uint64_t sweep_index = 0;
  /// y_t - g(y_t^rho; theta), kept in sync with `net`.
  Eigen::VectorXd residuals;
  /// Latest draw from the noise predictive.
  double noise_draw = 0.0;
};

void refresh_residuals(ChainState& state, const LagDataset& data);

/// Prior draws for tau and theta, phi ~ Be(a_phi, b_phi), every datum in
/// cluster 1 with R_t = 1, Lambda_1 from the base measure.
ChainState init_chain(RngStream& rng, const NetSpec& spec, const ModelHyper& hyper, const LagDataset& data);

/// Group-wise tau ~ Ga(alpha + dim/2, beta + |theta_g|^2 / 2).
PrecisionGroups sample_tau(RngStream& rng, const NetParams& net, std::span<const GammaPrior> priors);

struct SweepInfo {
  bool accepted = false;
  double delta_h = 0.0;
  std::string diagnostic;
};

/// One Gibbs sweep: weights, atoms, labels, slices, phi, theta (one HMC
/// transition), tau, noise predictive. Each step draws from its own
/// substream of `root` keyed by (sweep index, step).
SweepInfo sweep(const RngStream& root, ChainState& state, const LagDataset& data, const SamplerOptions& options,
                const ModelHyper& hyper);

struct RunProtocol {
  int total_sweeps = 40000;
  int burn_in = 2000;
  int thin = 50;

  void validate() const;
  /// Sweeps are numbered 1..total_sweeps; sweep s is kept when s > burn_in
  /// and (s - burn_in) is a multiple of thin.
  bool is_kept(int sweep) const;
  int kept_count() const;
};

struct TraceRecord {
  std::uint64_t sweep = 0;
  double phi = 0.0;
  int active_clusters = 0;
  double noise_draw = 0.0;
  std::optional<std::vector<double>> theta;
  std::optional<std::vector<double>> forecasts;
};

struct TraceOptions {
  bool store_theta = false;
  /// When > 0, each kept record carries the iterated forecast of this
  /// length from `forecast_lag_state` (most recent value first).
  int forecast_horizon = 0;
  std::vector<double> forecast_lag_state;
};

struct RunSummary {
  int sweeps = 0;
  int kept = 0;
  int accepted = 0;
  int nonfinite_trajectories = 0;
  double acceptance_rate = 0.0;
  double mean_active_clusters = 0.0;
  /// Noise-predictive draws of the kept sweeps.
  std::vector<double> noise_draws;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// Runs protocol.total_sweeps sweeps from `state`, passing kept records to
/// `sink` in sweep order.
RunSummary run(const RngStream& root, const RunProtocol& protocol, ChainState& state, const LagDataset& data,
               const SamplerOptions& options, const ModelHyper& hyper, const TraceOptions& trace_options,
               const TraceSink& sink);

struct RunResult {
  std::vector<TraceRecord> records;
  RunSummary summary;
};

RunResult run(const RngStream& root, const RunProtocol& protocol, ChainState& state, const LagDataset& data,
              const SamplerOptions& options, const ModelHyper& hyper, const TraceOptions& trace_options = {});

}  // namespace npbnn
