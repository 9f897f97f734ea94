#pragma once

// Noetherian systems df_i/dx_j = P_ij over the ambient ring
// Q(i)[x_1..x_n, f_1..f_m]: leaf derivations, multiplicity operators as
// ambient polynomials, and the explicit multiplicity bounds.
//
// Ambient variables are ordered x_1..x_n, then f_1..f_m.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mop/operators.hpp"
#include "mop/poly.hpp"
#include "mop/staircase.hpp"

namespace mop {

struct NoetherianSystem {
  std::size_t n = 0;
  std::size_t m = 0;
  /// P[i][j] = df_i / dx_j, an ambient polynomial in n + m variables.
  std::vector<std::vector<ExactPoly>> P;

  std::size_t ambient_dim() const { return n + m; }
  /// max deg P_ij, with zero entries counting as degree 0.
  std::size_t delta() const;
  /// Throws std::invalid_argument on shape or dimension errors.
  void validate() const;

  static NoetherianSystem exponential();  // n = m = 1, f' = f
  static NoetherianSystem trivial(std::size_t n);  // m = 0
};

/// D_j P = dP/dx_j + sum_i P_ij dP/df_i.
ExactPoly leaf_derivation(const ExactPoly& P, const NoetherianSystem& sys, std::size_t j);

/// D^alpha P, applying D_1 first. The order does not matter for integrable
/// systems; this is assumed, not checked.
ExactPoly leaf_derivative(const ExactPoly& P, const NoetherianSystem& sys, const MultiIndex& alpha);

/// Diagnostic: D_j D_l P == D_l D_j P for all j < l.
bool leaf_derivations_commute(const ExactPoly& P, const NoetherianSystem& sys);

/// Taylor coefficients of P restricted to the leaf through p (an ambient
/// point): coefficient of X^alpha is D^alpha P (p) / alpha!.
Jet<GaussRat> leaf_jet(const ExactPoly& P, const NoetherianSystem& sys, std::span<const GaussRat> p, std::size_t k);

/// Same, with the base point left symbolic: coefficients are ambient polynomials.
Jet<ExactPoly> symbolic_leaf_jet(const ExactPoly& P, const NoetherianSystem& sys, const JetBasisPtr& basis);

enum class SelectionPolicy { Canonical, All };

struct NoetherianOperator {
  std::vector<ColumnLabel> selected;
  ExactPoly poly;
  int degree = -1;
  std::uint64_t bound = 0;  // C(n+k, k) (d + k delta)
  bool ok = true;           // degree <= bound
};

struct NoetherianOperatorResult {
  Staircase B;
  std::size_t k = 0;
  std::size_t d = 0;
  std::size_t delta = 0;
  std::uint64_t bound = 0;
  std::vector<NoetherianOperator> operators;  // empty when every minor vanishes
  std::size_t minors_checked = 0;
};

inline constexpr std::size_t kNoetherianMinorCap = 5000;

/// Basic operators of order k = |B| for (P_1..P_n) on the leaves, as ambient
/// polynomials. Canonical returns the lexicographically first nonvanishing
/// minor; All returns every nonvanishing one. A minor counts as vanishing
/// when it is zero at two random rational ambient points. Throws
/// std::length_error past the symbolic caps.
NoetherianOperatorResult noetherian_operator(const std::vector<ExactPoly>& Ps, const NoetherianSystem& sys,
                                             const Staircase& B, SelectionPolicy policy = SelectionPolicy::Canonical,
                                             std::size_t minor_cap = kNoetherianMinorCap);

// ---- bound formulas ---------------------------------------------------------

struct BoundInput {
  std::uint64_t n = 1;
  std::uint64_t m = 1;
  std::uint64_t d = 1;
  std::uint64_t delta = 1;
  // Semilocal exponent only.
  std::uint64_t D = 1;
  std::uint64_t N = 1;
  std::uint64_t K = 1;
};

inline constexpr std::uint64_t kBigBoundMaxBits = 1000000;

/// A possibly enormous bound. `value` is present when it fits in
/// kBigBoundMaxBits bits; it is the exact quantity when `exact`, otherwise a
/// certified integer upper bound. `power` = (base, exponent) when the bound is
/// a pure power; then value == base^exponent whenever both are present.
struct BigBound {
  std::optional<mpz_class> value;
  bool exact = false;
  std::optional<std::pair<mpz_class, mpz_class>> power;
  double log10 = 0.0;
  std::vector<std::string> notes;

  std::string to_string() const;
};

/// -1, 0, 1 as a <, ==, > b; exact when both values are present.
int compare(const BigBound& a, const BigBound& b);

struct GkDetail {
  BigBound bound;
  BigBound first;   // (1/2) Q (... )^{2(m+n)} with the delta-dependent base
  BigBound second;  // (1/2) Q (2 (Q+n)^n (d + Q(delta-1)))^{2(m+n)}
  double Q_lower = 0.0;
  double Q_upper = 0.0;
  bool Q_exact = false;  // n = 1: Q = m + 1
};

/// Maximum of the two displayed expressions, with the transcendental Q
/// enclosed by outward-rounded MPFR arithmetic (only the upper end is used).
GkDetail gk_bound_detail(const BoundInput& inp);
BigBound gk_bound(const BoundInput& inp);

/// (2 d delta)^{n (n+1)^{2m} (m+n)^m}.
BigBound bn_bound(const BoundInput& inp);

/// max(D, C(n+K, K)(d + K delta))^N. The binomial's lower index is read as K.
BigBound semilocal_exponent(const BoundInput& inp);

}  // namespace mop
