#pragma once

#include <cstdint>
#include <random>

#include "mop/scalar.hpp"

namespace mop {

using Rng = std::mt19937_64;

/// p/q with |p| <= height, 1 <= q <= height.
inline mpq_class random_rational(Rng& rng, int height) {
  std::uniform_int_distribution<int> num(-height, height);
  std::uniform_int_distribution<int> den(1, height);
  mpq_class r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline GaussRat random_gauss_rational(Rng& rng, int height) {
  mpq_class re = random_rational(rng, height);
  mpq_class im = random_rational(rng, height);
  return GaussRat(std::move(re), std::move(im));
}

/// Nonzero variant, for generic combination coefficients.
inline GaussRat random_nonzero_gauss_rational(Rng& rng, int height) {
  GaussRat z;
  do {
    z = random_gauss_rational(rng, height);
  } while (z.is_zero());
  return z;
}

}  // namespace mop
