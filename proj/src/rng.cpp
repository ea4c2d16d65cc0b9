#include "npbnn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace npbnn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Marsaglia & Tsang (2000), valid for shape >= 1. Returns log of a
// unit-rate gamma variate.
double log_gamma_unit_ge1(RngStream& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = draw_std_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = draw_uniform(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RngStream RngStream::substream(std::uint64_t a, std::uint64_t b) const {
  std::uint64_t h = splitmix64(seed_ ^ 0x243f6a8885a308d3ULL);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x13198a2e03707344ULL));
  return RngStream(h);
}

double draw_uniform(RngStream& rng) {
  constexpr double kStep = 0x1.0p-53;
  return (static_cast<double>(rng.next_u64() >> 11) + 0.5) * kStep;
}

double draw_std_normal(RngStream& rng) {
  // Box-Muller, one output per call; keeps the stream stateless.
  const double u1 = draw_uniform(rng);
  const double u2 = draw_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double draw_normal(RngStream& rng, double mean, double precision) {
  if (!(precision > 0.0)) throw std::invalid_argument("draw_normal: precision must be positive");
  return mean + draw_std_normal(rng) / std::sqrt(precision);
}

double draw_gamma(RngStream& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("draw_gamma: shape and rate must be positive");
  }
  double log_x = 0.0;
  if (shape >= 1.0) {
    log_x = log_gamma_unit_ge1(rng, shape);
  } else {
    // Ga(shape) = Ga(shape + 1) * U^(1/shape); kept in log space since
    // U^(1/shape) underflows for small shapes.
    log_x = log_gamma_unit_ge1(rng, shape + 1.0) + std::log(draw_uniform(rng)) / shape;
  }
  const double x = std::exp(log_x - std::log(rate));
  return std::max(x, std::numeric_limits<double>::min());
}

double draw_beta(RngStream& rng, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("draw_beta: parameters must be positive");
  const double x = draw_gamma(rng, a, 1.0);
  const double y = draw_gamma(rng, b, 1.0);
  const double u = x / (x + y);
  // Keep strictly inside (0, 1).
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  return std::clamp(u, std::numeric_limits<double>::min(), 1.0 - kEps / 2);
}

std::size_t draw_categorical(RngStream& rng, std::span<const double> log_weights) {
  if (log_weights.empty()) throw std::invalid_argument("draw_categorical: empty weight list");
  double max_lw = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    if (std::isnan(lw)) throw std::invalid_argument("draw_categorical: NaN log-weight");
    max_lw = std::max(max_lw, lw);
  }
  if (!std::isfinite(max_lw)) throw std::domain_error("no admissible category");

  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - max_lw);
  const double target = draw_uniform(rng) * total;
  double cumulative = 0.0;
  std::size_t last_admissible = 0;
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    const double w = std::exp(log_weights[k] - max_lw);
    if (w > 0.0) last_admissible = k;
    cumulative += w;
    if (target < cumulative) return k;
  }
  return last_admissible;
}

}  // namespace npbnn
