#include "npbnn/gibbs.hpp"

#include <cmath>
#include <stdexcept>

#include "npbnn/forecast.hpp"

namespace npbnn {

namespace {

// Substream labels for the steps of one sweep.
enum Step : std::uint64_t {
  kAtoms = 2,
  kLabels = 3,
  kSlices = 4,
  kPhi = 5,
  kTheta = 6,
  kTau = 7,
  kPredictive = 8,
};

}  // namespace

ModelHyper ModelHyper::uniform_tau(const GsbHyper& gsb, GammaPrior tau_prior, const NetSpec& spec) {
  return {gsb, std::vector<GammaPrior>(static_cast<std::size_t>(spec.num_groups()), tau_prior)};
}

void ModelHyper::validate(const NetSpec& spec) const {
  gsb.validate();
  if (static_cast<int>(tau.size()) != spec.num_groups()) {
    throw std::invalid_argument("ModelHyper: need one tau hyperprior per parameter group");
  }
  for (const auto& p : tau) {
    if (!(p.shape > 0.0 && p.rate > 0.0)) throw std::invalid_argument("ModelHyper: tau hyperpriors must be positive");
  }
}

void refresh_residuals(ChainState& state, const LagDataset& data) {
  state.residuals = data.targets - forward_batch(state.net, data.inputs);
}

PrecisionGroups sample_tau(RngStream& rng, const NetParams& net, std::span<const GammaPrior> priors) {
  const int groups = net.spec().num_groups();
  if (static_cast<int>(priors.size()) != groups) throw std::invalid_argument("sample_tau: prior count mismatch");
  PrecisionGroups out;
  out.tau.resize(static_cast<std::size_t>(groups));
  for (int g = 0; g < groups; ++g) {
    const GroupRange r = net.group(g);
    const auto& p = priors[static_cast<std::size_t>(g)];
    out.tau[static_cast<std::size_t>(g)] =
        draw_gamma(rng, p.shape + 0.5 * static_cast<double>(r.size),
                   p.rate + 0.5 * net.flat().segment(r.offset, r.size).squaredNorm());
  }
  return out;
}

ChainState init_chain(RngStream& rng, const NetSpec& spec, const ModelHyper& hyper, const LagDataset& data) {
  spec.validate();
  hyper.validate(spec);
  if (data.rows() == 0) throw std::invalid_argument("init_chain: empty dataset");
  if (data.inputs.cols() != spec.input_size()) throw std::invalid_argument("init_chain: lag order != network inputs");

  ChainState s;
  s.precisions.tau.resize(static_cast<std::size_t>(spec.num_groups()));
  for (int g = 0; g < spec.num_groups(); ++g) {
    const auto& p = hyper.tau[static_cast<std::size_t>(g)];
    s.precisions.tau[static_cast<std::size_t>(g)] = draw_gamma(rng, p.shape, p.rate);
  }
  s.net = NetParams(spec);
  for (int g = 0; g < spec.num_groups(); ++g) {
    const GroupRange r = s.net.group(g);
    for (Eigen::Index i = 0; i < r.size; ++i) {
      s.net.flat()(r.offset + i) = draw_normal(rng, 0.0, s.precisions.tau[static_cast<std::size_t>(g)]);
    }
  }

  const auto n = static_cast<std::size_t>(data.rows());
  s.mixture.phi = draw_beta(rng, hyper.gsb.a_phi, hyper.gsb.b_phi);
  s.mixture.labels.assign(n, 1);
  s.mixture.slices.assign(n, 1);
  s.mixture.r_star = 1;
  s.mixture.atoms = {draw_gamma(rng, hyper.gsb.a_lambda, hyper.gsb.b_lambda)};
  refresh_residuals(s, data);
  return s;
}

SweepInfo sweep(const RngStream& root, ChainState& state, const LagDataset& data, const SamplerOptions& options,
                const ModelHyper& hyper) {
  const std::uint64_t s = state.sweep_index;
  auto stream = [&](Step step) { return root.substream(s, step); };
  std::span<const double> residuals(state.residuals.data(), static_cast<std::size_t>(state.residuals.size()));
  MixtureState& mix = state.mixture;

  // Step 1, the weights pi_k = phi (1 - phi)^(k-1), enters steps 3 and 8
  // through phi directly.
  {
    RngStream rng = stream(kAtoms);
    sample_atoms(rng, mix, hyper.gsb, residuals);
  }
  if (options.noise_model == NoiseModel::Nonparametric) {
    RngStream labels_rng = stream(kLabels);
    sample_labels(labels_rng, mix, residuals, options.label_rule);
    RngStream slices_rng = stream(kSlices);
    sample_slices(slices_rng, mix, hyper.gsb);
    RngStream phi_rng = stream(kPhi);
    sample_phi(phi_rng, mix, hyper.gsb);
  }

  SweepInfo info;
  {
    const std::vector<double> lam = mix.datum_precisions();
    const NetSpec& spec = state.net.spec();
    const PrecisionGroups& tau = state.precisions;
    PotentialFn u = [&](const Eigen::VectorXd& theta) {
      return potential(NetParams(spec, theta), tau, data, lam);
    };
    GradientFn grad = [&](const Eigen::VectorXd& theta) {
      return potential_grad(NetParams(spec, theta), tau, data, lam);
    };
    RngStream rng = stream(kTheta);
    HmcOutcome step = transition(rng, u, grad, state.net.flat(), options.hmc);
    info.accepted = step.accepted;
    info.delta_h = step.delta_h;
    info.diagnostic = std::move(step.diagnostic);
    if (step.accepted) {
      state.net.flat() = std::move(step.new_position);
      refresh_residuals(state, data);
    }
  }
  {
    RngStream rng = stream(kTau);
    state.precisions = sample_tau(rng, state.net, hyper.tau);
  }
  {
    RngStream rng = stream(kPredictive);
    state.noise_draw = options.noise_model == NoiseModel::Nonparametric
                           ? sample_noise_predictive(rng, mix, hyper.gsb)
                           : draw_normal(rng, 0.0, mix.atoms.front());
  }
  truncate_atoms(mix);
  ++state.sweep_index;
  return info;
}

void RunProtocol::validate() const {
  if (total_sweeps < 1 || burn_in < 0 || thin < 1 || burn_in >= total_sweeps) {
    throw std::invalid_argument("RunProtocol: need total_sweeps >= 1, 0 <= burn_in < total_sweeps, thin >= 1");
  }
}

bool RunProtocol::is_kept(int sweep) const { return sweep > burn_in && (sweep - burn_in) % thin == 0; }

int RunProtocol::kept_count() const { return (total_sweeps - burn_in) / thin; }

RunSummary run(const RngStream& root, const RunProtocol& protocol, ChainState& state, const LagDataset& data,
               const SamplerOptions& options, const ModelHyper& hyper, const TraceOptions& trace_options,
               const TraceSink& sink) {
  protocol.validate();
  if (trace_options.forecast_horizon > 0 &&
      static_cast<int>(trace_options.forecast_lag_state.size()) != state.net.spec().input_size()) {
    throw std::invalid_argument("run: forecast lag state must have one value per network input");
  }
  RunSummary summary;
  double active_total = 0.0;
  for (int s = 1; s <= protocol.total_sweeps; ++s) {
    const SweepInfo info = sweep(root, state, data, options, hyper);
    ++summary.sweeps;
    if (info.accepted) ++summary.accepted;
    if (!info.diagnostic.empty()) ++summary.nonfinite_trajectories;
    if (!protocol.is_kept(s)) continue;

    TraceRecord rec;
    rec.sweep = static_cast<std::uint64_t>(s);
    rec.phi = state.mixture.phi;
    rec.active_clusters = state.mixture.active_clusters();
    rec.noise_draw = state.noise_draw;
    if (trace_options.store_theta) {
      rec.theta = std::vector<double>(state.net.flat().begin(), state.net.flat().end());
    }
    if (trace_options.forecast_horizon > 0) {
      rec.forecasts = iterate_path([&](std::span<const double> x) { return forward(state.net, x); },
                                   trace_options.forecast_lag_state, trace_options.forecast_horizon);
    }
    ++summary.kept;
    active_total += rec.active_clusters;
    summary.noise_draws.push_back(rec.noise_draw);
    if (sink) sink(rec);
  }
  summary.acceptance_rate = static_cast<double>(summary.accepted) / summary.sweeps;
  summary.mean_active_clusters = summary.kept > 0 ? active_total / summary.kept : 0.0;
  return summary;
}

RunResult run(const RngStream& root, const RunProtocol& protocol, ChainState& state, const LagDataset& data,
              const SamplerOptions& options, const ModelHyper& hyper, const TraceOptions& trace_options) {
  RunResult result;
  result.summary = run(root, protocol, state, data, options, hyper, trace_options,
                       [&](const TraceRecord& r) { result.records.push_back(r); });
  return result;
}

}  // namespace npbnn
