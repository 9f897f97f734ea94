#pragma once

// Multiplicity matrices T^F_B and their witness minors.
//
// T^F_B has N = dim J_{n,k} rows and k + n*N columns: first one unit column
// per element of B, then for each component i and each |a| <= k the jet of
// x^a f_i. Every column set used here contains all k B-columns, so a minor
// equals a signed minor of the reduced matrix obtained by deleting the rows
// indexed by B and the B-columns. Rank(T) = N iff the reduced matrix has
// full row rank N - k, which is the condition "some maximal minor containing
// the B-columns is nonzero".

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mop/jet.hpp"
#include "mop/linalg.hpp"
#include "mop/poly.hpp"
#include "mop/staircase.hpp"

namespace mop {

struct ColumnLabel {
  enum class Kind { Basis, Monomial };
  Kind kind = Kind::Basis;
  std::size_t component = 0;  // meaningful for Monomial only
  MultiIndex mono;            // b for Basis, a for Monomial

  static ColumnLabel basis(const MultiIndex& b) { return {Kind::Basis, 0, b}; }
  static ColumnLabel monomial(std::size_t i, const MultiIndex& a) { return {Kind::Monomial, i, a}; }

  friend bool operator==(const ColumnLabel& a, const ColumnLabel& b) {
    return a.kind == b.kind && a.component == b.component && a.mono == b.mono;
  }
};

/// Column position of a label in T^F_B.
inline std::size_t column_index(const JetBasis& basis, const Staircase& B, const ColumnLabel& label) {
  if (label.kind == ColumnLabel::Kind::Basis) {
    const auto& el = B.elements();
    auto it = std::lower_bound(el.begin(), el.end(), label.mono, GrlexLess{});
    if (it == el.end() || *it != label.mono) throw std::invalid_argument("basis column not in staircase");
    return static_cast<std::size_t>(it - el.begin());
  }
  if (label.component >= basis.n()) throw std::invalid_argument("column component out of range");
  return B.size() + label.component * basis.size() + basis.rank(label.mono);
}

inline ColumnLabel column_label(const JetBasis& basis, const Staircase& B, std::size_t col) {
  const std::size_t k = B.size();
  if (col < k) return ColumnLabel::basis(B.elements()[col]);
  col -= k;
  return ColumnLabel::monomial(col / basis.size(), basis.monomial(col % basis.size()));
}

template <class R>
struct MultiplicityMatrix {
  JetBasisPtr basis;
  Staircase B;
  Matrix<R> entries;

  std::size_t N() const { return basis->size(); }
  std::size_t k() const { return B.size(); }
  std::size_t column_count() const { return entries.cols(); }
  ColumnLabel label(std::size_t col) const { return column_label(*basis, B, col); }
  std::size_t column(const ColumnLabel& l) const { return column_index(*basis, B, l); }
};

/// T^F_B for a k-jet map F (scalar or polynomial entries).
template <class R>
MultiplicityMatrix<R> build_T(const JetMap<R>& F, const Staircase& B) {
  check_jet_map(F);
  const JetBasisPtr& basis = F.front().basis_ptr();
  const std::size_t n = basis->n();
  const std::size_t k = basis->k();
  const std::size_t N = basis->size();
  if (B.size() != k) throw std::invalid_argument("staircase size must equal the jet order k");
  if (B.n() != n) throw std::invalid_argument("staircase dimension mismatch");
  const R zero = RingTraits<R>::zero_like(F.front()[0]);
  const R one = RingTraits<R>::one_like(F.front()[0]);
  MultiplicityMatrix<R> T{basis, B, Matrix<R>(N, k + n * N, zero)};
  for (std::size_t j = 0; j < k; ++j) T.entries(basis->rank(B.elements()[j]), j) = one;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < N; ++a) {
      const Jet<R> col = F[i].shifted(basis->monomial(a));
      const std::size_t c = k + i * N + a;
      for (std::size_t r = 0; r < N; ++r) T.entries(r, c) = col[r];
    }
  }
  return T;
}

namespace detail {

/// Rows of T not indexed by B, in ascending rank order.
inline std::vector<std::size_t> free_rows(const JetBasis& basis, const Staircase& B) {
  std::vector<bool> in_b(basis.size(), false);
  for (const auto& b : B.elements()) in_b[basis.rank(b)] = true;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < basis.size(); ++r) {
    if (!in_b[r]) rows.push_back(r);
  }
  return rows;
}

/// Sign of the row permutation moving the B-rows to the top.
inline bool basis_rows_odd(const JetBasis& basis, const Staircase& B) {
  std::size_t parity = 0;
  for (std::size_t j = 0; j < B.size(); ++j) parity += basis.rank(B.elements()[j]) - j;
  return parity % 2 == 1;
}

template <class R>
Matrix<R> reduced_submatrix(const MultiplicityMatrix<R>& T, const std::vector<std::size_t>& mon_cols) {
  const auto rows = free_rows(*T.basis, T.B);
  Matrix<R> out(rows.size(), mon_cols.size(), RingTraits<R>::zero_like(T.entries(0, 0)));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < mon_cols.size(); ++c) out(r, c) = T.entries(rows[r], mon_cols[c]);
  }
  return out;
}

/// Column indices of `selected`, validated: N distinct columns, all B-columns among them.
template <class R>
std::vector<std::size_t> minor_columns(const MultiplicityMatrix<R>& T, const std::vector<ColumnLabel>& selected) {
  std::vector<std::size_t> cols;
  cols.reserve(selected.size());
  for (const auto& l : selected) cols.push_back(T.column(l));
  std::sort(cols.begin(), cols.end());
  if (std::adjacent_find(cols.begin(), cols.end()) != cols.end()) {
    throw std::invalid_argument("repeated column in selection");
  }
  if (cols.size() != T.N()) throw std::invalid_argument("selection must have N = dim J_{n,k} columns");
  for (std::size_t j = 0; j < T.k(); ++j) {
    if (cols[j] != j) throw std::invalid_argument("selection must contain every basis column");
  }
  return cols;
}

}  // namespace detail

/// Determinant of the N x N submatrix of T on `selected`, columns taken in
/// canonical order. `one` is the ring unit (needed for polynomial entries).
template <class R>
R minor_determinant(const MultiplicityMatrix<R>& T, const std::vector<ColumnLabel>& selected, const R& one) {
  auto cols = detail::minor_columns(T, selected);
  std::vector<std::size_t> mon(cols.begin() + static_cast<std::ptrdiff_t>(T.k()), cols.end());
  Matrix<R> red = detail::reduced_submatrix(T, mon);
  R det;
  if constexpr (std::is_same_v<R, Complex>) {
    det = lu_determinant(std::move(red));
  } else {
    det = bareiss_determinant(std::move(red), one);
  }
  if (detail::basis_rows_odd(*T.basis, T.B)) det = RingTraits<R>::zero_like(one) - det;
  return det;
}

/// A basic multiplicity operator realised at one matrix: the selected
/// columns, the determinant of that minor, and the rank of T.
template <class S>
struct OperatorWitness {
  Staircase B;
  std::vector<ColumnLabel> selected;  // empty when rank < N
  S det{};
  std::size_t rank = 0;
  std::size_t homogeneity = 0;       // N - k
  std::optional<double> condition;   // float mode: 1-norm condition of the minor

  bool nonzero() const { return !selected.empty() && !ScalarTraits<S>::is_zero(det); }
  double magnitude() const { return ScalarTraits<S>::abs_double(det); }
};

/// Rank of T plus one canonical nonzero minor containing the B-columns.
template <class S>
OperatorWitness<S> witness_minor(const MultiplicityMatrix<S>& T) {
  const std::size_t N = T.N();
  const std::size_t k = T.k();
  OperatorWitness<S> w;
  w.B = T.B;
  w.homogeneity = N - k;
  std::vector<std::size_t> mon_all;
  for (std::size_t c = k; c < T.column_count(); ++c) mon_all.push_back(c);
  Matrix<S> red = detail::reduced_submatrix(T, mon_all);
  const ColumnSelection sel = select_independent_columns(red);
  w.rank = k + sel.rank;
  w.det = S(0);
  if (w.rank < N) return w;
  for (std::size_t j = 0; j < k; ++j) w.selected.push_back(T.label(j));
  for (std::size_t c : sel.columns) w.selected.push_back(T.label(mon_all[c]));
  w.det = minor_determinant(T, w.selected, S(1));
  if constexpr (!ScalarTraits<S>::exact) {
    std::vector<std::size_t> cols;
    for (const auto& l : w.selected) cols.push_back(T.column(l));
    w.condition = condition_number(T.entries.select_columns(cols));
  }
  return w;
}

/// Value at p of the basic operator with the given columns.
template <class S>
S evaluate_operator(const JetMap<S>& jets_at_p, const Staircase& B, const std::vector<ColumnLabel>& selected) {
  return minor_determinant(build_T(jets_at_p, B), selected, S(1));
}

template <class S>
S evaluate_operator(const PolySystem<S>& F, const Staircase& B, const std::vector<ColumnLabel>& selected,
                    std::span<const S> p) {
  const std::size_t n = system_dim(F);
  if (F.size() != n) throw std::invalid_argument("map must have n components in n variables");
  return evaluate_operator(jet_at(F, p, JetBasis::make(n, B.size())), B, selected);
}

struct OperatorSpec {
  Staircase B;
  std::vector<ColumnLabel> selected;
};

/// Convex combination sum_j w_j M_j(F)(p); weights non-negative summing to 1.
template <class S>
S evaluate_operator(const PolySystem<S>& F, const std::vector<OperatorSpec>& ops, const std::vector<S>& weights,
                    std::span<const S> p) {
  if (ops.size() != weights.size() || ops.empty()) {
    throw std::invalid_argument("one weight per operator required");
  }
  S total(0);
  S sum(0);
  for (std::size_t j = 0; j < ops.size(); ++j) {
    if constexpr (ScalarTraits<S>::exact) {
      if (!weights[j].is_real() || sgn(weights[j].re()) < 0) throw std::invalid_argument("weights must be >= 0");
    } else {
      if (weights[j].imag() != 0.0 || weights[j].real() < 0.0) throw std::invalid_argument("weights must be >= 0");
    }
    sum += weights[j];
    total += weights[j] * evaluate_operator(F, ops[j].B, ops[j].selected, p);
  }
  if constexpr (ScalarTraits<S>::exact) {
    if (sum != S(1)) throw std::invalid_argument("weights must sum to 1");
  } else {
    if (std::abs(sum - S(1)) > 1e-12) throw std::invalid_argument("weights must sum to 1");
  }
  return total;
}

template <class S>
struct MultTestResult {
  bool exceeds = false;
  std::optional<OperatorWitness<S>> witness;
  double s = 0.0;  // |det| of the witness
  std::size_t staircases_checked = 0;
};

/// mult_p F > k iff every basic operator of order k vanishes at p. The first
/// staircase (in enumeration order) with a full-rank T supplies the witness.
template <class S>
MultTestResult<S> mult_exceeds(const PolySystem<S>& F, std::span<const S> p, std::size_t k,
                               std::size_t staircase_cap = kDefaultStaircaseCap) {
  const std::size_t n = system_dim(F);
  if (F.size() != n) throw std::invalid_argument("map must have n components in n variables");
  const auto jets = jet_at(F, p, JetBasis::make(n, k));
  MultTestResult<S> out;
  for (const auto& B : enumerate_staircases(n, k, staircase_cap)) {
    ++out.staircases_checked;
    auto w = witness_minor(build_T(jets, B));
    if (w.rank == w.B.size() + w.homogeneity) {
      out.s = w.magnitude();
      out.witness = std::move(w);
      return out;
    }
  }
  out.exceeds = true;
  return out;
}

inline constexpr std::size_t kSymbolicMinorCap = 40;

/// The operator as a polynomial in the base point p: entries of T are the
/// symbolic Taylor coefficients (1/a!) d^a f_i(p).
inline ExactPoly operator_polynomial(const PolySystem<GaussRat>& F, const Staircase& B,
                                     const std::vector<ColumnLabel>& selected,
                                     std::size_t minor_cap = kSymbolicMinorCap) {
  const std::size_t n = system_dim(F);
  if (F.size() != n) throw std::invalid_argument("map must have n components in n variables");
  const auto basis = JetBasis::make(n, B.size());
  if (basis->size() - B.size() > minor_cap) throw std::length_error("symbolic determinant too large");
  const auto T = build_T(symbolic_jet(F, basis), B);
  return minor_determinant(T, selected, ExactPoly::constant(n, GaussRat(1)));
}

}  // namespace mop
