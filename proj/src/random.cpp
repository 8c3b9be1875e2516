#include "adnms/random.hpp"

#include <cmath>
#include <numbers>

#include "adnms/error.hpp"

namespace adnms {

double Rng::uniform_open(double lo, double hi) {
  for (;;) {
    const double v = uniform(lo, hi);
    if (v > lo && v < hi) return v;
  }
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

unsigned Rng::poisson(double mean) {
  if (!(mean >= 0.0 && mean <= 500.0)) throw ConfigError("poisson mean must be in [0, 500]");
  if (mean == 0.0) return 0;
  const double limit = std::exp(-mean);
  unsigned k = 0;
  double p = uniform();
  while (p > limit) {
    ++k;
    p *= uniform();
  }
  return k;
}

}  // namespace adnms
