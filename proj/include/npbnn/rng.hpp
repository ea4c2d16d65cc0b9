#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace npbnn {

/// Seedable random stream. One root stream per chain; everything else is
/// derived with substream() so the draws of one Gibbs step never depend on
/// how many draws an earlier step consumed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Child stream labelled by (a, b), e.g. (sweep index, step index).
  /// Pure function of (seed, a, b); does not advance this stream.
  RngStream substream(std::uint64_t a, std::uint64_t b = 0) const;

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Uniform on the open interval (0, 1): 53-bit grid shifted by half a step,
/// so neither endpoint is reachable.
double draw_uniform(RngStream& rng);

double draw_std_normal(RngStream& rng);

/// Normal with the given mean and precision (inverse variance).
double draw_normal(RngStream& rng, double mean, double precision);

/// Gamma with density proportional to x^(shape-1) exp(-rate x).
/// Result is clamped below at the smallest normal double so that it can
/// always be used as a precision.
double draw_gamma(RngStream& rng, double shape, double rate);

double draw_beta(RngStream& rng, double a, double b);

/// Index k with probability exp(lw_k - logsumexp(lw)). Entries may be -inf.
std::size_t draw_categorical(RngStream& rng, std::span<const double> log_weights);

}  // namespace npbnn
