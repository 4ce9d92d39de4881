#include "okflow/rng.hpp"

#include "okflow/errors.hpp"

#include <cmath>

namespace okflow {

std::int64_t Rng::next_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw input_error("Rng::next_int: empty range");
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(next_u64() % span);
}

double Rng::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::next_log_uniform(double lo, double hi) {
  return lo * std::exp(next_unit() * std::log(hi / lo));
}

std::complex<double> Rng::next_phase() {
  double theta = next_unit() * 6.283185307179586476925286766559;
  return {std::cos(theta), std::sin(theta)};
}

Rat Rng::next_rat_nonzero(std::int64_t span) {
  for (;;) {
    std::int64_t num = next_int(-span, span);
    if (num == 0) continue;
    std::int64_t den = next_int(1, span);
    return Rat(Int(num), Int(den));
  }
}

} // namespace okflow
