#pragma once

// Ground-truth computations independent of the multiplicity operators:
// colengths of jet ideals, local multiplicity, generic reductions, and
// orders along parametrised curves.

#include <cstdint>
#include <optional>
#include <vector>

#include "mop/poly.hpp"
#include "mop/random.hpp"

namespace mop {

/// Generators of an ideal in the local ring at the origin.
struct IdealGens {
  IdealGens(std::vector<ExactPoly> gens);  // NOLINT(google-explicit-constructor)
  std::size_t n = 0;
  std::vector<ExactPoly> generators;
};

/// dim J_{n,k} / j^k(I): N minus the rank of the span of j^k(x^a g).
std::size_t jet_quotient_dim(const IdealGens& I, std::size_t k);

struct MultReport {
  std::size_t k_used = 0;
  std::vector<std::size_t> d_sequence;  // d_0, d_1, ..., d_{k_used}
  std::optional<std::size_t> result;    // unset when the cap was reached
};

inline constexpr std::size_t kDefaultMultCap = 20;

/// dim O/I, found as the first d_k with d_k <= k.
MultReport multiplicity(const IdealGens& I, std::size_t kmax = kDefaultMultCap);

struct HsReport {
  std::size_t value = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::optional<std::size_t>> per_trial;
};

/// Minimum over seeded trials of the colength of n random Q(i)-combinations
/// of the generators. Throws std::domain_error when I is not m-primary.
HsReport hs_multiplicity(const IdealGens& I, std::size_t trials = 3, std::uint64_t seed = 7,
                         std::size_t kmax = kDefaultMultCap);

struct SamplingPolicy {
  bool generator_tuples = true;   // every n-subset of the generators
  std::size_t random_tuples = 2;  // tuples of random combinations
  unsigned degree_cap = 12;       // operators of higher degree are dropped
  std::uint64_t seed = 7;
};

struct OperatorIdeal {
  IdealGens ideal;  // original generators followed by adjoined operators
  std::size_t original_count = 0;
  std::size_t tuples_sampled = 0;
  std::size_t operators_computed = 0;
  std::size_t dropped_by_degree = 0;
  SamplingPolicy policy;
};

/// Inner approximation of I + <M(f_1..f_n)>: operators of the sampled
/// tuples, one per staircase and selection point (origin, random point).
OperatorIdeal mop_ideal_generators(const IdealGens& I, std::size_t k, const SamplingPolicy& policy = {});

/// Polynomial parametrisation s -> G(s) of a curve germ; the curve
/// parameter is t = s^q.
struct CurveParam {
  std::vector<ExactPoly> components;  // univariate
  unsigned q = 1;
};

/// Leading exponent of f(G(s)) divided by q; std::nullopt when f vanishes on the curve.
std::optional<mpq_class> curve_order(const ExactPoly& f, const CurveParam& gamma);

}  // namespace mop
