#include "npbnn/gsb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace npbnn {

namespace {

constexpr int kMaxSlice = 100'000'000;

double log_normal_kernel(double r, double precision) {
  return 0.5 * std::log(precision) - 0.5 * precision * r * r;
}

}  // namespace

std::vector<double> weights(WeightFamily family, double phi, std::size_t K) {
  if (K < 1) throw std::invalid_argument("weights: K must be >= 1");
  std::vector<double> w(K);
  switch (family) {
    case WeightFamily::Geometric:
    case WeightFamily::NegBin3: {
      if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("weights: phi must lie in (0, 1)");
      const double log_q = std::log1p(-phi);
      for (std::size_t i = 0; i < K; ++i) {
        const double k = static_cast<double>(i + 1);
        double pk = phi * std::exp((k - 1.0) * log_q);
        if (family == WeightFamily::NegBin3) pk *= (1.0 + k * phi) / 2.0;
        w[i] = pk;
      }
      break;
    }
    case WeightFamily::Poisson: {
      if (!(phi > 0.0) || !std::isfinite(phi)) throw std::invalid_argument("weights: phi must be positive");
      // (Gamma(k) - Gamma(k, phi)) / Gamma(k) is the regularized lower
      // incomplete gamma P(k, phi).
      for (std::size_t i = 0; i < K; ++i) {
        w[i] = boost::math::gamma_p(static_cast<double>(i + 1), phi) / phi;
      }
      break;
    }
  }
  return w;
}

void GsbHyper::validate() const {
  if (!(a_phi > 0.0 && b_phi > 0.0 && a_lambda > 0.0 && b_lambda > 0.0)) {
    throw std::invalid_argument("GsbHyper: all parameters must be positive");
  }
}

void MixtureState::check_invariants() const {
  if (!(phi > 0.0 && phi < 1.0)) throw std::logic_error("mixture: phi outside (0, 1)");
  if (labels.size() != slices.size()) throw std::logic_error("mixture: labels/slices length mismatch");
  int max_r = 0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] < 1 || labels[t] > slices[t]) throw std::logic_error("mixture: need 1 <= d_t <= R_t");
    max_r = std::max(max_r, slices[t]);
  }
  if (!labels.empty() && max_r != r_star) throw std::logic_error("mixture: R* is not max R_t");
  if (static_cast<int>(atoms.size()) < r_star) throw std::logic_error("mixture: fewer atoms than R*");
  for (double a : atoms) {
    if (!(a > 0.0)) throw std::logic_error("mixture: non-positive atom");
  }
}

int MixtureState::active_clusters() const {
  return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

std::vector<double> MixtureState::datum_precisions() const {
  std::vector<double> out(labels.size());
  for (std::size_t t = 0; t < labels.size(); ++t) out[t] = atoms[static_cast<std::size_t>(labels[t] - 1)];
  return out;
}

GammaPrior atom_conditional(const GsbHyper& hyper, std::span<const double> cluster_residuals) {
  double ss = 0.0;
  for (double r : cluster_residuals) ss += r * r;
  return {hyper.a_lambda + 0.5 * static_cast<double>(cluster_residuals.size()), hyper.b_lambda + 0.5 * ss};
}

void sample_atoms(RngStream& rng, MixtureState& state, const GsbHyper& hyper, std::span<const double> residuals) {
  if (residuals.size() != state.size()) throw std::invalid_argument("sample_atoms: one residual per datum required");
  const auto k_max = static_cast<std::size_t>(state.r_star);
  std::vector<double> count(k_max, 0.0);
  std::vector<double> ss(k_max, 0.0);
  for (std::size_t t = 0; t < residuals.size(); ++t) {
    const auto k = static_cast<std::size_t>(state.labels[t] - 1);
    count[k] += 1.0;
    ss[k] += residuals[t] * residuals[t];
  }
  if (state.atoms.size() < k_max) state.atoms.resize(k_max);
  for (std::size_t k = 0; k < k_max; ++k) {
    state.atoms[k] = draw_gamma(rng, hyper.a_lambda + 0.5 * count[k], hyper.b_lambda + 0.5 * ss[k]);
  }
}

void sample_labels(RngStream& rng, MixtureState& state, std::span<const double> residuals, LabelRule rule) {
  if (residuals.size() != state.size()) throw std::invalid_argument("sample_labels: one residual per datum required");
  const double log_phi = std::log(state.phi);
  const double log_q = std::log1p(-state.phi);
  std::vector<double> lw;
  for (std::size_t t = 0; t < residuals.size(); ++t) {
    const int r = state.slices[t];
    lw.resize(static_cast<std::size_t>(r));
    for (int k = 1; k <= r; ++k) {
      double v = log_normal_kernel(residuals[t], state.atoms[static_cast<std::size_t>(k - 1)]);
      if (rule == LabelRule::StickWeighted) v += log_phi + (k - 1) * log_q;
      lw[static_cast<std::size_t>(k - 1)] = v;
    }
    state.labels[t] = static_cast<int>(draw_categorical(rng, lw)) + 1;
  }
}

void sample_slices(RngStream& rng, MixtureState& state, const GsbHyper& hyper) {
  const double log_q = std::log1p(-state.phi);
  int r_star = 0;
  for (std::size_t t = 0; t < state.size(); ++t) {
    // Inverse CDF of the geometric on {0, 1, ...} with success prob phi.
    const double g = std::floor(std::log(draw_uniform(rng)) / log_q);
    if (!(g < kMaxSlice)) throw std::runtime_error("sample_slices: slice variable overflow (phi too small)");
    state.slices[t] = state.labels[t] + static_cast<int>(g);
    r_star = std::max(r_star, state.slices[t]);
  }
  state.r_star = r_star;
  while (static_cast<int>(state.atoms.size()) < r_star) {
    state.atoms.push_back(draw_gamma(rng, hyper.a_lambda, hyper.b_lambda));
  }
}

void sample_phi(RngStream& rng, MixtureState& state, const GsbHyper& hyper) {
  const auto n = static_cast<double>(state.size());
  if (n < 1) throw std::invalid_argument("sample_phi: need at least one datum");
  double sum_r = 0.0;
  for (int r : state.slices) sum_r += r;
  state.phi = draw_beta(rng, hyper.a_phi + 2.0 * n, hyper.b_phi + sum_r - n);
}

int predictive_component(double phi, std::size_t atom_count, double u) {
  const double log_q = std::log1p(-phi);
  double cumulative = 0.0;
  for (std::size_t k = 1; k <= atom_count; ++k) {
    cumulative += phi * std::exp(static_cast<double>(k - 1) * log_q);
    if (u <= cumulative) return static_cast<int>(k);
  }
  return static_cast<int>(atom_count) + 1;
}

double sample_noise_predictive(RngStream& rng, const MixtureState& state, const GsbHyper& hyper) {
  const int k = predictive_component(state.phi, state.atoms.size(), draw_uniform(rng));
  const double precision = k <= static_cast<int>(state.atoms.size())
                               ? state.atoms[static_cast<std::size_t>(k - 1)]
                               : draw_gamma(rng, hyper.a_lambda, hyper.b_lambda);
  return draw_normal(rng, 0.0, precision);
}

void truncate_atoms(MixtureState& state) {
  if (static_cast<int>(state.atoms.size()) > state.r_star) state.atoms.resize(static_cast<std::size_t>(state.r_star));
}

std::vector<double> mixture_density(const MixtureState& state, const GsbHyper& hyper, std::span<const double> z_grid) {
  const std::size_t K = state.atoms.size();
  const std::vector<double> pi = K > 0 ? weights(WeightFamily::Geometric, state.phi, K) : std::vector<double>{};
  double used = 0.0;
  for (double p : pi) used += p;
  const double leftover = std::max(0.0, 1.0 - used);

  // Normal scale mixture over Ga(a, b) precisions is a Student-t with
  // 2a degrees of freedom and scale sqrt(b / a).
  const double a = hyper.a_lambda;
  const double b = hyper.b_lambda;
  const double log_t_norm = std::lgamma(a + 0.5) - std::lgamma(a) - 0.5 * std::log(2.0 * std::numbers::pi * b);

  std::vector<double> out(z_grid.size());
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    const double z = z_grid[i];
    double f = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double lam = state.atoms[k];
      f += pi[k] * std::sqrt(lam / (2.0 * std::numbers::pi)) * std::exp(-0.5 * lam * z * z);
    }
    if (leftover > 0.0) f += leftover * std::exp(log_t_norm - (a + 0.5) * std::log1p(z * z / (2.0 * b)));
    out[i] = f;
  }
  return out;
}

}  // namespace npbnn
