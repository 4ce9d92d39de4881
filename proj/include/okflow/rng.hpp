#ifndef OKFLOW_RNG_HPP
#define OKFLOW_RNG_HPP

#include "okflow/rational.hpp"

#include <complex>
#include <cstdint>
#include <random>

namespace okflow {

// Deterministic random source. Distributions are hand-rolled on top of
// mt19937_64 so that identical seeds give identical draws on any platform;
// certificates and reports must be reproducible byte for byte.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [lo, hi], inclusive. Modulo bias is irrelevant at desk scale.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi);

  double next_unit(); // [0, 1)

  double next_log_uniform(double lo, double hi); // lo, hi > 0

  std::complex<double> next_phase(); // |z| = 1

  // Nonzero rational with numerator in [-span, span] and denominator in [1, span].
  Rat next_rat_nonzero(std::int64_t span);

private:
  std::mt19937_64 gen_;
};

} // namespace okflow

#endif
