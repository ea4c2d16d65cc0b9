#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "npbnn/rng.hpp"

namespace npbnn {

/// Leapfrog step size, number of steps and diagonal mass matrix. An empty
/// `mass` means the identity.
struct HmcConfig {
  double epsilon = 0.01;
  int steps = 10;
  Eigen::VectorXd mass;

  void validate(Eigen::Index dim) const;
  double inverse_mass(Eigen::Index i) const { return mass.size() == 0 ? 1.0 : 1.0 / mass(i); }
};

using PotentialFn = std::function<double(const Eigen::VectorXd&)>;
using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct PhasePoint {
  Eigen::VectorXd position;
  Eigen::VectorXd momentum;
  /// False when a non-finite gradient was met; the point is then unusable.
  bool finite = true;
};

/// S leapfrog steps: half momentum step, full position step, half momentum
/// step, with kinetic energy eta' M^-1 eta / 2.
PhasePoint leapfrog(const GradientFn& grad, Eigen::VectorXd position, Eigen::VectorXd momentum,
                    const HmcConfig& config);

double kinetic_energy(const Eigen::VectorXd& momentum, const HmcConfig& config);

struct HmcOutcome {
  Eigen::VectorXd new_position;
  bool accepted = false;
  /// H(end) - H(start); +inf when the trajectory hit a non-finite value.
  double delta_h = 0.0;
  double initial_h = 0.0;
  /// Non-empty when the trajectory was abandoned.
  std::string diagnostic;
};

/// One HMC transition: draws eta ~ N(0, M), integrates, and accepts with
/// probability min(1, exp(-delta_h)). On rejection new_position is a copy of
/// `position`.
HmcOutcome transition(RngStream& rng, const PotentialFn& potential, const GradientFn& grad,
                      const Eigen::VectorXd& position, const HmcConfig& config);

}  // namespace npbnn
