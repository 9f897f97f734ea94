#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mop/poly.hpp"

namespace testsupport {

using mop::ExactPoly;
using mop::GaussRat;
using mop::MultiIndex;

inline GaussRat q(const std::string& s) { return GaussRat(mop::parse_rational(s)); }

/// Polynomial from (exponents, "p/q") pairs.
inline ExactPoly poly(std::size_t n, const std::vector<std::pair<std::vector<unsigned>, std::string>>& terms) {
  ExactPoly p(n);
  for (const auto& [e, c] : terms) p.add_term(MultiIndex(e), q(c));
  return p;
}

/// Coefficient drawn from {-3..3}/{1,2}.
inline GaussRat small_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-3, 3);
  std::uniform_int_distribution<int> den(1, 2);
  return GaussRat(mpq_class(num(rng), den(rng)));
}

inline GaussRat small_gaussian(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-3, 3);
  std::uniform_int_distribution<int> den(1, 2);
  mpq_class re(num(rng), den(rng));
  mpq_class im(num(rng), den(rng));
  re.canonicalize();
  im.canonicalize();
  return GaussRat(re, im);
}

/// Random polynomial with terms of degree in [lo, hi], each present with probability 1/2.
inline ExactPoly random_poly(std::mt19937_64& rng, std::size_t n, unsigned lo, unsigned hi, bool gaussian = false) {
  ExactPoly p(n);
  std::bernoulli_distribution keep(0.5);
  for (unsigned d = lo; d <= hi; ++d) {
    for (const auto& m : mop::monomials_of_degree(n, d)) {
      if (keep(rng)) p.add_term(m, gaussian ? small_gaussian(rng) : small_rational(rng));
    }
  }
  return p;
}

}  // namespace testsupport
