#pragma once

// Choice of a weight t making one index dominate each of several
// non-negative sequences: t^{i(j)} a_{j,i(j)} >= A * sum_{i != i(j)} t^i a_{j,i}.

#include <gmpxx.h>

#include <vector>

namespace mop {

struct ValironInstance {
  std::vector<std::vector<mpq_class>> rows;  // each of length k+2
  mpq_class M;                               // bound on the last entry of each row
  mpq_class A;                               // > 1
  mpq_class t0;                              // > 0
};

struct ValironResult {
  mpq_class t;
  std::vector<std::size_t> index;  // i(j) in [0, k]
  bool feasible = false;           // domination holds exactly at t
  bool bound_holds = false;        // t >= valiron_lower_bound(inst)
};

/// Throws std::invalid_argument unless every row has k+2 non-negative
/// entries, the first k+1 summing to 1, the last at most M; A > 1, t0 > 0.
void validate(const ValironInstance& inst);

/// (2A+1)^{-2N(k+1)} * min(t0, 1/(M(k+1))); the min is t0 when M = 0.
mpq_class valiron_lower_bound(const ValironInstance& inst);

/// Exact check of the domination inequality for every row.
bool valiron_dominates(const ValironInstance& inst, const mpq_class& t, const std::vector<std::size_t>& index);

/// Largest admissible log_{2A+1} t below min(log t0, -last hull slope),
/// avoiding the unit neighbourhoods of all negated hull slopes; verified
/// exactly. Throws std::logic_error if verification cannot be achieved.
ValironResult valiron_select(const ValironInstance& inst);

/// Natural logarithm of a positive rational, accurate for huge/tiny values.
double log_rational(const mpq_class& q);

}  // namespace mop
