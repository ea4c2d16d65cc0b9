#include "npbnn/hmc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace npbnn {

void HmcConfig::validate(Eigen::Index dim) const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("hmc: epsilon must be positive");
  if (steps < 1) throw std::invalid_argument("hmc: steps must be >= 1");
  if (mass.size() != 0) {
    if (mass.size() != dim) throw std::invalid_argument("hmc: mass vector length does not match dimension");
    if (!(mass.array() > 0.0).all()) throw std::invalid_argument("hmc: mass entries must be positive");
  }
}

double kinetic_energy(const Eigen::VectorXd& momentum, const HmcConfig& config) {
  if (config.mass.size() == 0) return 0.5 * momentum.squaredNorm();
  return 0.5 * (momentum.array().square() / config.mass.array()).sum();
}

PhasePoint leapfrog(const GradientFn& grad, Eigen::VectorXd position, Eigen::VectorXd momentum,
                    const HmcConfig& config) {
  config.validate(position.size());
  if (momentum.size() != position.size()) throw std::invalid_argument("leapfrog: position/momentum size mismatch");
  const double eps = config.epsilon;
  Eigen::VectorXd inv_mass = config.mass.size() == 0 ? Eigen::VectorXd::Ones(position.size())
                                                     : Eigen::VectorXd(config.mass.cwiseInverse());

  Eigen::VectorXd g = grad(position);
  for (int s = 0; s < config.steps; ++s) {
    if (!g.allFinite()) return {std::move(position), std::move(momentum), false};
    momentum -= 0.5 * eps * g;
    position += eps * inv_mass.cwiseProduct(momentum);
    g = grad(position);
    if (!g.allFinite()) return {std::move(position), std::move(momentum), false};
    momentum -= 0.5 * eps * g;
  }
  return {std::move(position), std::move(momentum), true};
}

HmcOutcome transition(RngStream& rng, const PotentialFn& potential, const GradientFn& grad,
                      const Eigen::VectorXd& position, const HmcConfig& config) {
  config.validate(position.size());
  Eigen::VectorXd momentum(position.size());
  for (Eigen::Index i = 0; i < momentum.size(); ++i) {
    momentum(i) = draw_std_normal(rng) / std::sqrt(config.inverse_mass(i));
  }
  // Drawn before integrating so the stream is consumed identically whether
  // or not the trajectory blows up.
  const double log_u = std::log(draw_uniform(rng));

  HmcOutcome out;
  out.new_position = position;
  out.initial_h = potential(position) + kinetic_energy(momentum, config);
  if (!std::isfinite(out.initial_h)) throw std::domain_error("hmc: non-finite energy at the current state");

  const PhasePoint end = leapfrog(grad, position, momentum, config);
  if (!end.finite) {
    out.delta_h = std::numeric_limits<double>::infinity();
    out.diagnostic = "non-finite gradient during trajectory";
    return out;
  }
  const double final_h = potential(end.position) + kinetic_energy(end.momentum, config);
  if (!std::isfinite(final_h)) {
    out.delta_h = std::numeric_limits<double>::infinity();
    out.diagnostic = "non-finite energy at trajectory end";
    return out;
  }
  out.delta_h = final_h - out.initial_h;
  if (log_u < -out.delta_h) {
    out.accepted = true;
    out.new_position = end.position;
  }
  return out;
}

}  // namespace npbnn
