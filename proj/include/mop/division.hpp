#pragma once

// Effective division by a map F with a nonzero basic operator at the origin.
//
// A witness (staircase B plus an N x N nonsingular minor of T^F_B) makes
// J_{n,k} = span{x^b : b in B} + span of the selected x^a f_i. Solving that
// system gives the Cramer decomposition; combining k+1 monomials along a
// divisor chain kills the x^B part (local resultant); a weight t chosen by
// the Valiron lemma makes those combinations contractive, and a Neumann
// series extends the decomposition to all of m^{k+1}.
//
// Exact-mode magnitudes use |z| <= |re| + |im|, so every recorded norm is an
// upper bound on the true one; s_low = max(|re|, |im|) bounds |det| below.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mop/jet.hpp"
#include "mop/linalg.hpp"
#include "mop/operators.hpp"
#include "mop/poly.hpp"
#include "mop/staircase.hpp"
#include "mop/valiron.hpp"

namespace mop {

namespace detail {

template <class S>
mpq_class mag_to_q(const Magnitude<S>& m) {
  if constexpr (ScalarTraits<S>::exact) {
    return m;
  } else {
    return mpq_class(m);
  }
}

template <class S>
Magnitude<S> mag_from_q(const mpq_class& q) {
  if constexpr (ScalarTraits<S>::exact) {
    return q;
  } else {
    return q.get_d();
  }
}

template <class S>
Magnitude<S> mag_from_double(double d) {
  if constexpr (ScalarTraits<S>::exact) {
    return mpq_class(d);
  } else {
    return d;
  }
}

template <class M>
M mag_max(const M& a, const M& b) {
  return a < b ? b : a;
}

template <class S>
bool is_real_poly(const Poly<S>& p) {
  if constexpr (ScalarTraits<S>::exact) {
    for (const auto& [m, c] : p.terms()) {
      if (!c.is_real()) return false;
    }
    return true;
  } else {
    for (const auto& [m, c] : p.terms()) {
      if (c.imag() != 0.0) return false;
    }
    return true;
  }
}

inline constexpr double kFloatIdentityTolerance = 1e-9;

}  // namespace detail

template <class S>
struct DecompositionCertificate {
  double s = 0.0;  // |det| of the witness minor
  Magnitude<S> norm_P{0};
  Magnitude<S> max_c{0};
  Magnitude<S> max_U{0};
  Magnitude<S> norm_E{0};
  Magnitude<S> C_inst{0};
  bool bound_holds = false;   // max(|c|, ||U||, ||E||) <= C_inst s^{-1} ||P||
  double jet_residual = 0.0;  // float mode: largest dropped coefficient of degree <= k in E
};

template <class S>
struct Decomposition {
  std::vector<std::pair<MultiIndex, S>> c;  // one entry per element of B
  std::vector<Poly<S>> U;
  Poly<S> E;
  DecompositionCertificate<S> certificate;

  Poly<S> basis_part() const {
    Poly<S> p(E.n());
    for (const auto& [b, v] : c) p.add_term(b, v);
    return p;
  }
};

/// The witness linear system at the origin, inverted once.
template <class S>
class WitnessSystem {
 public:
  WitnessSystem(PolySystem<S> F, const OperatorWitness<S>& w) : F_(std::move(F)), B_(w.B), selected_(w.selected) {
    n_ = system_dim(F_);
    if (F_.size() != n_) throw std::invalid_argument("map must have n components in n variables");
    if (!w.nonzero()) throw std::invalid_argument("witness determinant vanishes");
    basis_ = JetBasis::make(n_, B_.size());
    const std::vector<S> origin(n_, S(0));
    const auto T = build_T(jet_at(F_, std::span<const S>(origin), basis_), B_);
    const auto cols = detail::minor_columns(T, selected_);
    labels_.clear();
    for (std::size_t c : cols) labels_.push_back(T.label(c));
    det_ = minor_determinant(T, selected_, S(1));
    if constexpr (ScalarTraits<S>::exact) {
      if (det_ != w.det) throw std::invalid_argument("witness does not match F at the origin");
      s_ = std::sqrt(det_.norm2().get_d());
      s_low_ = det_.abs_lower();
      s_up_ = det_.abs_bound();
    } else {
      if (std::abs(det_ - w.det) > 1e-8 * std::max(1.0, std::abs(det_))) {
        throw std::invalid_argument("witness does not match F at the origin");
      }
      s_ = std::abs(det_);
      s_low_ = s_;
      s_up_ = s_;
    }
    auto inv = inverse(T.entries.select_columns(cols));
    if (!inv) throw std::invalid_argument("witness minor is numerically singular");
    inv_ = std::move(*inv);

    // |c_b| <= alpha_b ||P||, ||U_i|| <= beta_i ||P||, hence
    // ||E|| <= (1 + sum alpha + sum beta_i ||f_i||) ||P||.
    const std::size_t N = basis_->size();
    const std::size_t k = B_.size();
    Magnitude<S> max_alpha(0);
    Magnitude<S> sum_alpha(0);
    std::vector<Magnitude<S>> beta(n_, Magnitude<S>(0));
    for (std::size_t r = 0; r < N; ++r) {
      Magnitude<S> row_max(0);
      for (std::size_t c = 0; c < N; ++c) row_max = detail::mag_max(row_max, ScalarTraits<S>::abs(inv_(r, c)));
      if (r < k) {
        max_alpha = detail::mag_max(max_alpha, row_max);
        sum_alpha += row_max;
      } else {
        beta[labels_[r].component] += row_max;
      }
    }
    Magnitude<S> K_E = Magnitude<S>(1) + sum_alpha;
    Magnitude<S> max_beta(0);
    for (std::size_t i = 0; i < n_; ++i) {
      K_E += beta[i] * F_[i].norm_l1();
      max_beta = detail::mag_max(max_beta, beta[i]);
    }
    C_inst_ = s_up_ * detail::mag_max(K_E, detail::mag_max(max_alpha, max_beta));
  }

  std::size_t n() const { return n_; }
  std::size_t k() const { return B_.size(); }
  std::size_t N() const { return basis_->size(); }
  const PolySystem<S>& F() const { return F_; }
  const Staircase& B() const { return B_; }
  const JetBasisPtr& basis() const { return basis_; }
  const std::vector<ColumnLabel>& labels() const { return labels_; }
  const S& det() const { return det_; }
  double s() const { return s_; }
  const Magnitude<S>& s_low() const { return s_low_; }
  const Magnitude<S>& C_inst() const { return C_inst_; }
  bool real_data() const {
    for (const auto& f : F_) {
      if (!detail::is_real_poly(f)) return false;
    }
    return true;
  }

  /// m <= C s^{-1} x, decided exactly in exact mode.
  bool within_C_over_s(const Magnitude<S>& m, const Magnitude<S>& C, const Magnitude<S>& x) const {
    if constexpr (ScalarTraits<S>::exact) {
      const mpq_class lhs = m * m * det_.norm2();
      const mpq_class rhs = C * x;
      return lhs <= rhs * rhs;
    } else {
      return m * s_ <= C * x * (1.0 + 1e-9);
    }
  }

  /// P = sum c_b x^b + sum U_i f_i + E with E in m^{k+1}; P of any degree.
  Decomposition<S> decompose(const Poly<S>& P) const {
    if (P.n() != n_) throw std::invalid_argument("target dimension mismatch");
    const std::size_t k = B_.size();
    const std::size_t N = basis_->size();
    const auto jet = Jet<S>::from_poly(basis_, P);
    const auto x = mat_vec(inv_, jet.coeffs());
    Decomposition<S> d;
    d.U.assign(n_, Poly<S>(n_));
    d.E = Poly<S>(n_);
    for (std::size_t r = 0; r < N; ++r) {
      if (r < k) {
        d.c.emplace_back(B_.elements()[r], x[r]);
      } else {
        d.U[labels_[r].component].add_term(labels_[r].mono, x[r]);
      }
    }
    Poly<S> E = P - d.basis_part();
    for (std::size_t i = 0; i < n_; ++i) E -= d.U[i] * F_[i];
    if constexpr (ScalarTraits<S>::exact) {
      if (!E.truncated(k).is_zero()) throw std::logic_error("Cramer decomposition left a low-order residue");
      d.E = std::move(E);
    } else {
      const Poly<S> low = E.truncated(k);
      for (const auto& [m, c] : low.terms()) {
        d.certificate.jet_residual = std::max(d.certificate.jet_residual, std::abs(c));
      }
      d.E = E.tail(k);
    }
    auto& cert = d.certificate;
    cert.s = s_;
    cert.C_inst = C_inst_;
    cert.norm_P = P.norm_l1();
    for (const auto& [b, v] : d.c) cert.max_c = detail::mag_max(cert.max_c, ScalarTraits<S>::abs(v));
    for (const auto& u : d.U) cert.max_U = detail::mag_max(cert.max_U, u.norm_l1());
    cert.norm_E = d.E.norm_l1();
    const Magnitude<S> worst = detail::mag_max(cert.max_c, detail::mag_max(cert.max_U, cert.norm_E));
    cert.bound_holds = within_C_over_s(worst, C_inst_, cert.norm_P);
    return d;
  }

 private:
  PolySystem<S> F_;
  Staircase B_;
  std::vector<ColumnLabel> selected_;
  std::vector<ColumnLabel> labels_;  // columns of the minor in canonical order
  std::size_t n_ = 0;
  JetBasisPtr basis_;
  Matrix<S> inv_;
  S det_{};
  double s_ = 0.0;
  Magnitude<S> s_low_{0};
  Magnitude<S> s_up_{0};
  Magnitude<S> C_inst_{0};
};

/// Witness of the basic operator for (F, B) at the origin.
template <class S>
OperatorWitness<S> origin_witness(const PolySystem<S>& F, const Staircase& B) {
  const std::size_t n = system_dim(F);
  const std::vector<S> origin(n, S(0));
  return witness_minor(build_T(jet_at(F, std::span<const S>(origin), JetBasis::make(n, B.size())), B));
}

template <class S>
Decomposition<S> cramer_decompose(const Poly<S>& P, const PolySystem<S>& F, const OperatorWitness<S>& w) {
  return WitnessSystem<S>(F, w).decompose(P);
}

namespace detail {

/// First kernel vector in reduced-echelon order: first free column set to 1,
/// the other free columns to 0. Returns (vector, kernel dimension).
template <class S>
std::pair<std::vector<S>, std::size_t> canonical_kernel_vector(Matrix<S> a) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  double tol = 0.0;
  if constexpr (!ScalarTraits<S>::exact) tol = kFloatRankTolerance * std::max(1.0, max_abs(a));
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    if constexpr (ScalarTraits<S>::exact) {
      while (p < rows && a(p, c).is_zero()) ++p;
      if (p == rows) continue;
    } else {
      for (std::size_t i = r + 1; i < rows; ++i) {
        if (std::abs(a(i, c)) > std::abs(a(p, c))) p = i;
      }
      if (std::abs(a(p, c)) <= tol) continue;
    }
    a.swap_rows(r, p);
    const S inv = S(1) / a(r, c);
    for (std::size_t j = 0; j < cols; ++j) a(r, j) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || ScalarTraits<S>::is_zero(a(i, c))) continue;
      const S f = a(i, c);
      for (std::size_t j = 0; j < cols; ++j) a(i, j) -= f * a(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::size_t free_col = 0;
  while (is_pivot[free_col]) ++free_col;  // cols > rows guarantees a free column
  std::vector<S> v(cols, S(0));
  v[free_col] = S(1);
  for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = S(0) - a(i, free_col);
  return {std::move(v), cols - pivots.size()};
}

}  // namespace detail

template <class S>
struct LocalResultant {
  std::vector<S> coeffs;  // sum |c_i| = 1
  Poly<S> P;              // sum c_i p_i
  Decomposition<S> decomposition;  // its x^B part vanishes
  std::size_t kernel_dim = 0;
};

/// Combination of k+1 polynomials of degree <= k whose Cramer decomposition
/// has no x^B part.
template <class S>
LocalResultant<S> local_resultant(const std::vector<Poly<S>>& ps, const WitnessSystem<S>& sys) {
  const std::size_t k = sys.k();
  if (ps.size() != k + 1) throw std::invalid_argument("local resultant needs exactly k+1 polynomials");
  Matrix<S> C(k, k + 1, S(0));
  for (std::size_t j = 0; j <= k; ++j) {
    if (ps[j].n() != sys.n()) throw std::invalid_argument("polynomial dimension mismatch");
    if (ps[j].degree() > static_cast<int>(k)) throw std::invalid_argument("local resultant inputs must lie in J_{n,k}");
    const auto d = sys.decompose(ps[j]);
    for (std::size_t b = 0; b < k; ++b) C(b, j) = d.c[b].second;
  }
  auto [v, dim] = detail::canonical_kernel_vector(std::move(C));
  Magnitude<S> total(0);
  for (const auto& x : v) total += ScalarTraits<S>::abs(x);
  const S scale = S(1) / ScalarTraits<S>::from_rational(detail::mag_to_q<S>(total));
  LocalResultant<S> out;
  out.kernel_dim = dim;
  out.P = Poly<S>(sys.n());
  for (std::size_t j = 0; j <= k; ++j) {
    if constexpr (ScalarTraits<S>::exact) {
      out.coeffs.push_back(v[j] * scale);
    } else {
      out.coeffs.push_back(v[j] / total);
    }
    Poly<S> term = ps[j];
    term *= out.coeffs.back();
    out.P += term;
  }
  out.decomposition = sys.decompose(out.P);
  if constexpr (ScalarTraits<S>::exact) {
    for (const auto& [b, c] : out.decomposition.c) {
      if (!c.is_zero()) throw std::logic_error("local resultant left an x^B component");
    }
  }
  return out;
}

template <class S>
LocalResultant<S> local_resultant(const std::vector<Poly<S>>& ps, const PolySystem<S>& F,
                                  const OperatorWitness<S>& w) {
  return local_resultant(ps, WitnessSystem<S>(F, w));
}

/// Divisor chain 1 = x^{a_0} | x^{a_1} | ... | x^{a_k} = x^a, removing the
/// last nonzero coordinate first when walking down from a.
inline std::vector<MultiIndex> divisor_chain(const MultiIndex& a) {
  std::vector<MultiIndex> chain{a};
  MultiIndex cur = a;
  while (!cur.is_zero()) {
    std::size_t i = cur.size();
    while (cur[i - 1] == 0) --i;
    cur.set(i - 1, cur[i - 1] - 1);
    chain.push_back(cur);
  }
  return {chain.rbegin(), chain.rend()};
}

template <class S>
struct MonomialDecomposition {
  MultiIndex alpha;
  std::vector<MultiIndex> chain;
  std::vector<S> gamma;  // local resultant coefficients along the chain
  std::size_t j0 = 0;    // Valiron index
  Poly<S> P;             // degree < k
  std::vector<Poly<S>> u;
  Poly<S> E;             // in m^{k+1}
  bool identity_ok = false;  // x^a = P + sum u_i f_i + E, deg P < k, E in m^{k+1}
  bool norm_ok = false;      // ||P||_t + ||E||_t < ||x^a||_t / A
  bool u_ok = false;         // ||u_i||_t <= 2 C_inst s^{-1} t^{-k} ||x^a||_t
};

template <class S>
struct MonomialDecompositionSet {
  mpq_class A;
  ValironResult valiron;
  Magnitude<S> t{0};
  std::vector<MonomialDecomposition<S>> items;
  bool real_data = false;  // the bounds are guaranteed for real coefficients
  bool all_checks_hold() const {
    for (const auto& it : items) {
      if (!it.identity_ok || !it.norm_ok || !it.u_ok) return false;
    }
    return true;
  }
};

/// Every x^a with |a| = k written as P_a + sum u_{i,a} f_i + E_a, with one
/// weight t shared by all a.
template <class S>
MonomialDecompositionSet<S> monomial_decompositions(const WitnessSystem<S>& sys, const mpq_class& A) {
  if (!(A > 2)) throw std::invalid_argument("A must exceed 2");
  const std::size_t n = sys.n();
  const std::size_t k = sys.k();
  const mpq_class scale = pow_rational(mpq_class(2), static_cast<long>(n + k + 1));
  const mpq_class C = detail::mag_to_q<S>(sys.C_inst());
  const mpq_class s_low = detail::mag_to_q<S>(sys.s_low());

  MonomialDecompositionSet<S> out;
  out.A = A;
  out.real_data = sys.real_data();
  std::vector<LocalResultant<S>> resultants;
  ValironInstance inst;
  inst.A = A;
  inst.M = scale * C / s_low;
  inst.t0 = s_low / (scale * C);
  const auto alphas = monomials_of_degree(n, k);
  for (const auto& a : alphas) {
    MonomialDecomposition<S> item;
    item.alpha = a;
    item.chain = divisor_chain(a);
    std::vector<Poly<S>> ps;
    for (const auto& m : item.chain) ps.push_back(Poly<S>::monomial(m, S(1)));
    auto lr = local_resultant(ps, sys);
    item.gamma = lr.coeffs;
    std::vector<mpq_class> row;
    mpq_class sum(0);
    for (const auto& g : lr.coeffs) {
      row.push_back(detail::mag_to_q<S>(ScalarTraits<S>::abs(g)));
      sum += row.back();
    }
    row.push_back(scale * detail::mag_to_q<S>(lr.decomposition.E.norm_l1()));
    if (sum != 1) {
      // float mode: rounding in the normalisation
      for (auto& x : row) x /= sum;
    }
    if (row.back() > inst.M) {
      if constexpr (ScalarTraits<S>::exact) throw std::logic_error("local resultant error exceeds its certificate");
      inst.M = row.back();
    }
    inst.rows.push_back(std::move(row));
    resultants.push_back(std::move(lr));
    out.items.push_back(std::move(item));
  }
  out.valiron = valiron_select(inst);
  out.t = detail::mag_from_q<S>(out.valiron.t);
  const Magnitude<S>& t = out.t;
  const Magnitude<S> t_k = ScalarTraits<S>::mag_pow(t, static_cast<long>(k));
  const Magnitude<S> two_C = Magnitude<S>(2) * sys.C_inst();

  for (std::size_t idx = 0; idx < alphas.size(); ++idx) {
    auto& item = out.items[idx];
    const auto& lr = resultants[idx];
    item.j0 = out.valiron.index[idx];
    const MultiIndex shift = item.alpha - item.chain[item.j0];
    const S inv_lead = S(1) / item.gamma[item.j0];
    item.P = Poly<S>(n);
    item.E = lr.decomposition.E.shifted(shift);
    item.E *= inv_lead;
    for (std::size_t i = 0; i <= k; ++i) {
      if (i == item.j0) continue;
      const S coef = S(0) - item.gamma[i] * inv_lead;
      if (i < item.j0) {
        item.P.add_term(shift + item.chain[i], coef);
      } else {
        item.E.add_term(shift + item.chain[i], coef);
      }
    }
    for (const auto& U : lr.decomposition.U) {
      Poly<S> u = U.shifted(shift);
      u *= inv_lead;
      item.u.push_back(std::move(u));
    }

    Poly<S> residual = Poly<S>::monomial(item.alpha, S(1)) - item.P - item.E;
    for (std::size_t i = 0; i < n; ++i) residual -= item.u[i] * sys.F()[i];
    const bool shape = item.P.degree() < static_cast<int>(k) && (item.E.is_zero() || item.E.min_degree() > static_cast<int>(k));
    if constexpr (ScalarTraits<S>::exact) {
      item.identity_ok = shape && residual.is_zero();
    } else {
      item.identity_ok = shape && residual.norm_l1() <= detail::kFloatIdentityTolerance;
    }
    const Magnitude<S> lhs = item.P.norm_weighted(t) + item.E.norm_weighted(t);
    if constexpr (ScalarTraits<S>::exact) {
      item.norm_ok = lhs * A < t_k;
    } else {
      item.norm_ok = lhs * A.get_d() < t_k;
    }
    item.u_ok = true;
    for (const auto& u : item.u) item.u_ok = item.u_ok && sys.within_C_over_s(u.norm_weighted(t), two_C, Magnitude<S>(1));
  }
  return out;
}

template <class S>
MonomialDecompositionSet<S> monomial_decompositions(const PolySystem<S>& F, const OperatorWitness<S>& w,
                                                    const mpq_class& A) {
  return monomial_decompositions(WitnessSystem<S>(F, w), A);
}

class ContractionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class S>
struct DivisionResult {
  std::vector<Poly<S>> u;
  Poly<S> remainder;               // supported on x^B
  Magnitude<S> residual_norm{0};   // >= ||P - sum u_i f_i - remainder||_t
  Magnitude<S> t{0};
  Magnitude<S> norm_P_t{0};
  std::size_t iterations = 0;
  std::size_t working_degree = 0;
  bool converged = false;
  double bound_constant = 0.0;   // (sum ||u_i||_t + ||rem||_t) s^{k+1} / ||P||_t
  double contraction = 0.0;      // max over the working space of ||E(x^b)||_t / t^{|b|}
  double max_step_ratio = 0.0;   // largest measured ||f_{m+1}||_t / ||f_m||_t
  double s = 0.0;
  double epsilon = 0.0;          // (2^{n+k+1} C_inst)^{-1}
  double log10_C_A_inv = 0.0;    // log10 of (2A+1)^{C(n+k-1,k) 2(k+1)} (k+1)
  Magnitude<S> C_inst{0};
  bool monomial_bounds_hold = false;
};

inline std::size_t default_working_degree(std::size_t k) { return std::max<std::size_t>(4 * k, 4); }

/// P = sum u_i f_i + remainder with remainder on x^B, via the Neumann series
/// of the operator E on m^{k+1}, truncated at degree D_w. A = 3.
template <class S>
DivisionResult<S> weierstrass_divide(const Poly<S>& P, const WitnessSystem<S>& sys, std::size_t D_w, double tol,
                                     std::size_t max_iterations = 1000) {
  const std::size_t n = sys.n();
  const std::size_t k = sys.k();
  if (P.n() != n) throw std::invalid_argument("target dimension mismatch");
  if (D_w < 2 * k) throw std::invalid_argument("working degree must be at least 2k");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  const mpq_class A(3);
  const auto mono = monomial_decompositions(sys, A);
  const Magnitude<S> t = mono.t;

  DivisionResult<S> out;
  out.t = t;
  out.working_degree = D_w;
  out.s = sys.s();
  out.C_inst = sys.C_inst();
  out.monomial_bounds_hold = mono.all_checks_hold();
  out.epsilon = 1.0 / (std::pow(2.0, static_cast<double>(n + k + 1)) * ScalarTraits<S>::mag_to_double(sys.C_inst()));
  out.log10_C_A_inv = static_cast<double>(binomial(n + k - 1, k) * 2 * (k + 1)) * std::log10(7.0) +
                      std::log10(static_cast<double>(k + 1));

  std::map<MultiIndex, std::size_t, GrlexLess> alpha_pos;
  for (std::size_t i = 0; i < mono.items.size(); ++i) alpha_pos.emplace(mono.items[i].alpha, i);

  struct Image {
    Poly<S> pi;
    std::vector<Poly<S>> U;
    Poly<S> E;
  };
  std::map<MultiIndex, Image, GrlexLess> images;
  // x^b = x^g (P_a + sum u_{i,a} f_i + E_a) with the low-order part of x^g P_a
  // pushed back through the Cramer decomposition.
  auto image_of = [&](const MultiIndex& beta) -> const Image& {
    auto it = images.find(beta);
    if (it != images.end()) return it->second;
    MultiIndex alpha(n);
    unsigned left = static_cast<unsigned>(k);
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned take = std::min(left, beta[i]);
      alpha.set(i, take);
      left -= take;
    }
    const MultiIndex g = beta - alpha;
    const auto& item = mono.items[alpha_pos.at(alpha)];
    const Poly<S> Q = item.P.shifted(g);
    const auto leak = sys.decompose(Q.truncated(k));
    Image img{leak.basis_part(), {}, Q.tail(k) + item.E.shifted(g) + leak.E};
    for (std::size_t i = 0; i < n; ++i) img.U.push_back(item.u[i].shifted(g) + leak.U[i]);
    return images.emplace(beta, std::move(img)).first->second;
  };

  for (std::size_t d = k + 1; d <= D_w; ++d) {
    const Magnitude<S> td = ScalarTraits<S>::mag_pow(t, static_cast<long>(d));
    for (const auto& beta : monomials_of_degree(n, d)) {
      const double ratio = ScalarTraits<S>::mag_to_double(image_of(beta).E.norm_weighted(t)) /
                           ScalarTraits<S>::mag_to_double(td);
      out.contraction = std::max(out.contraction, ratio);
    }
  }

  out.u.assign(n, Poly<S>(n));
  out.remainder = Poly<S>(n);
  Magnitude<S> tails(0);
  auto split_tail = [&](Poly<S>& f) {
    const Poly<S> high = f.tail(D_w);
    if (!high.is_zero()) {
      tails += high.norm_weighted(t);
      f = f.truncated(D_w);
    }
  };

  Poly<S> f = P.tail(k);
  const Poly<S> low = P.truncated(k);
  if (!low.is_zero()) {
    const auto d0 = sys.decompose(low);
    out.remainder += d0.basis_part();
    for (std::size_t i = 0; i < n; ++i) out.u[i] += d0.U[i];
    f += d0.E;
  }
  split_tail(f);

  out.norm_P_t = P.norm_weighted(t);
  const Magnitude<S> target = detail::mag_from_double<S>(tol) * out.norm_P_t;
  Magnitude<S> norm_f = f.norm_weighted(t);
  while (!f.is_zero()) {
    if (norm_f + tails <= target) break;
    if (out.iterations >= max_iterations) break;
    Poly<S> next(n);
    for (const auto& [beta, c] : f.terms()) {
      const Image& img = image_of(beta);
      Poly<S> piece = img.pi;
      piece *= c;
      out.remainder += piece;
      for (std::size_t i = 0; i < n; ++i) {
        piece = img.U[i];
        piece *= c;
        out.u[i] += piece;
      }
      piece = img.E;
      piece *= c;
      next += piece;
    }
    const Magnitude<S> norm_next = next.norm_weighted(t);
    const double ratio = ScalarTraits<S>::mag_to_double(norm_next) / ScalarTraits<S>::mag_to_double(norm_f);
    out.max_step_ratio = std::max(out.max_step_ratio, ratio);
    if (!(ratio < 1.0)) {
      throw ContractionFailure("Neumann step did not contract (ratio " + std::to_string(ratio) + ")");
    }
    f = std::move(next);
    split_tail(f);
    norm_f = f.norm_weighted(t);
    ++out.iterations;
  }
  out.residual_norm = norm_f + tails;
  out.converged = out.residual_norm <= target;

  if (!P.is_zero()) {
    double total = ScalarTraits<S>::mag_to_double(out.remainder.norm_weighted(t));
    for (const auto& u : out.u) total += ScalarTraits<S>::mag_to_double(u.norm_weighted(t));
    out.bound_constant = total * std::pow(sys.s(), static_cast<double>(k + 1)) /
                         ScalarTraits<S>::mag_to_double(out.norm_P_t);
  }
  return out;
}

template <class S>
DivisionResult<S> weierstrass_divide(const Poly<S>& P, const PolySystem<S>& F, const OperatorWitness<S>& w,
                                     std::size_t D_w, double tol) {
  return weierstrass_divide(P, WitnessSystem<S>(F, w), D_w, tol);
}

}  // namespace mop
