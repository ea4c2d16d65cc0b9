#pragma once

#include <span>
#include <vector>

#include "npbnn/rng.hpp"

namespace npbnn {

/// Weight family induced by the distribution of the slice variable R_t.
/// Only Geometric (R_t ~ Nbin(2, phi)) drives the sampler; the other two are
/// available for density evaluation.
enum class WeightFamily { Geometric, NegBin3, Poisson };

/// First K mixture weights of `family` at parameter `phi`.
///   Geometric: phi (1-phi)^(k-1)
///   NegBin3:   phi (1-phi)^(k-1) (1 + k phi) / 2
///   Poisson:   (Gamma(k) - Gamma(k, phi)) / (phi Gamma(k))
std::vector<double> weights(WeightFamily family, double phi, std::size_t K);

struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
};

struct GsbHyper {
  double a_phi = 1.0;
  double b_phi = 1.0;
  double a_lambda = 3.0;
  double b_lambda = 0.001;
  WeightFamily weight_family = WeightFamily::Geometric;

  void validate() const;
  GammaPrior base_measure() const { return {a_lambda, b_lambda}; }
};

/// How the cluster label is drawn given its slice R_t.
enum class LabelRule {
  /// pr(d_t = k) proportional to N(y_t | g_t, 1/Lambda_k) 1(k <= R_t): the
  /// exact conditional of the slice augmentation (d_t uniform given R_t).
  SliceUniform,
  /// pr(d_t = k) proportional to pi_k N(y_t | g_t, 1/Lambda_k) 1(k <= R_t).
  StickWeighted,
};

/// State of the noise mixture. Cluster ids are 1-based: labels[t] = k refers
/// to atoms[k - 1].
struct MixtureState {
  double phi = 0.5;
  std::vector<double> atoms;
  std::vector<int> labels;
  std::vector<int> slices;
  int r_star = 1;

  std::size_t size() const { return labels.size(); }
  /// Throws std::logic_error when 1 <= d_t <= R_t <= R* <= K, Lambda_k > 0,
  /// 0 < phi < 1 fails.
  void check_invariants() const;
  /// Number of distinct labels in use.
  int active_clusters() const;
  /// Lambda_{d_t} for every datum.
  std::vector<double> datum_precisions() const;
};

/// Shape/rate of the atom conditional given the residuals of its cluster.
GammaPrior atom_conditional(const GsbHyper& hyper, std::span<const double> cluster_residuals);

/// Step 2: Lambda_k for k = 1..R* from Ga(a + n_k/2, b + sum r^2 / 2);
/// clusters with no data draw from the base measure.
void sample_atoms(RngStream& rng, MixtureState& state, const GsbHyper& hyper, std::span<const double> residuals);

/// Step 3 for every datum; log-space categorical over k = 1..R_t.
void sample_labels(RngStream& rng, MixtureState& state, std::span<const double> residuals,
                   LabelRule rule = LabelRule::SliceUniform);

/// Step 4: R_t = d_t + G, G ~ Geometric(phi) on {0, 1, ...}; refreshes R*
/// and extends the atom list with base-measure draws when R* grows.
void sample_slices(RngStream& rng, MixtureState& state, const GsbHyper& hyper);

/// Step 5: phi ~ Be(a_phi + 2n, b_phi + sum R_t - n).
void sample_phi(RngStream& rng, MixtureState& state, const GsbHyper& hyper);

/// Cluster index (1-based) picked by the cumulative-weight search of the
/// noise predictive for uniform `u`; values above the atom count mean the
/// weights ran out.
int predictive_component(double phi, std::size_t atom_count, double u);

/// Step 8: one draw from the noise predictive.
double sample_noise_predictive(RngStream& rng, const MixtureState& state, const GsbHyper& hyper);

/// Drops atoms above R*.
void truncate_atoms(MixtureState& state);

/// Density of the truncated mixture sum_{k<=K} pi_k N(z | 0, 1/Lambda_k),
/// with the leftover mass 1 - sum pi_k spread over the prior predictive
/// (Student-t) kernel of the base measure.
std::vector<double> mixture_density(const MixtureState& state, const GsbHyper& hyper, std::span<const double> z_grid);

}  // namespace npbnn
