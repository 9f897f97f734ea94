#include "mop/noetherian.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mop/linalg.hpp"
#include "mop/random.hpp"

namespace mop {

// ---- systems and derivations ----------------------------------------------

std::size_t NoetherianSystem::delta() const {
  std::size_t d = 0;
  for (const auto& row : P) {
    for (const auto& p : row) d = std::max<std::size_t>(d, static_cast<std::size_t>(std::max(p.degree(), 0)));
  }
  return d;
}

void NoetherianSystem::validate() const {
  if (n == 0) throw std::invalid_argument("Noetherian system needs n >= 1");
  if (n + m > MultiIndex::kMaxVars) throw std::invalid_argument("too many ambient variables");
  if (P.size() != m) throw std::invalid_argument("Noetherian system needs one row of P per function");
  for (const auto& row : P) {
    if (row.size() != n) throw std::invalid_argument("each row of P needs one entry per variable");
    for (const auto& p : row) {
      if (p.n() != n + m) throw std::invalid_argument("P_ij must live in the ambient ring");
    }
  }
}

NoetherianSystem NoetherianSystem::exponential() {
  NoetherianSystem sys;
  sys.n = 1;
  sys.m = 1;
  sys.P = {{ExactPoly::variable(2, 1)}};
  return sys;
}

NoetherianSystem NoetherianSystem::trivial(std::size_t n) {
  NoetherianSystem sys;
  sys.n = n;
  sys.m = 0;
  return sys;
}

ExactPoly leaf_derivation(const ExactPoly& P, const NoetherianSystem& sys, std::size_t j) {
  if (P.n() != sys.ambient_dim()) throw std::invalid_argument("polynomial is not in the ambient ring");
  if (j >= sys.n) throw std::invalid_argument("leaf derivation index out of range");
  ExactPoly out = P.derivative(j);
  for (std::size_t i = 0; i < sys.m; ++i) {
    const ExactPoly df = P.derivative(sys.n + i);
    if (!df.is_zero()) out += sys.P[i][j] * df;
  }
  return out;
}

ExactPoly leaf_derivative(const ExactPoly& P, const NoetherianSystem& sys, const MultiIndex& alpha) {
  if (alpha.size() != sys.n) throw std::invalid_argument("alpha must range over the x variables");
  ExactPoly out = P;
  for (std::size_t j = 0; j < sys.n; ++j) {
    for (unsigned e = 0; e < alpha[j] && !out.is_zero(); ++e) out = leaf_derivation(out, sys, j);
  }
  return out;
}

bool leaf_derivations_commute(const ExactPoly& P, const NoetherianSystem& sys) {
  for (std::size_t j = 0; j < sys.n; ++j) {
    for (std::size_t l = j + 1; l < sys.n; ++l) {
      const ExactPoly a = leaf_derivation(leaf_derivation(P, sys, l), sys, j);
      const ExactPoly b = leaf_derivation(leaf_derivation(P, sys, j), sys, l);
      if (!(a - b).is_zero()) return false;
    }
  }
  return true;
}

namespace {

GaussRat inverse_factorial(const MultiIndex& a) {
  mpz_class f(1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (unsigned e = 2; e <= a[i]; ++e) f *= e;
  }
  return GaussRat(mpq_class(mpz_class(1), f));
}

}  // namespace

Jet<ExactPoly> symbolic_leaf_jet(const ExactPoly& P, const NoetherianSystem& sys, const JetBasisPtr& basis) {
  sys.validate();
  if (basis->n() != sys.n) throw std::invalid_argument("jet basis must range over the x variables");
  Jet<ExactPoly> j(basis, ExactPoly(sys.ambient_dim()));
  for (std::size_t r = 0; r < basis->size(); ++r) {
    const MultiIndex& a = basis->monomial(r);
    ExactPoly d = leaf_derivative(P, sys, a);
    d *= inverse_factorial(a);
    j[r] = std::move(d);
  }
  return j;
}

Jet<GaussRat> leaf_jet(const ExactPoly& P, const NoetherianSystem& sys, std::span<const GaussRat> p, std::size_t k) {
  sys.validate();
  if (p.size() != sys.ambient_dim()) throw std::invalid_argument("leaf point must be ambient");
  const auto basis = JetBasis::make(sys.n, k);
  const auto sym = symbolic_leaf_jet(P, sys, basis);
  Jet<GaussRat> out(basis, GaussRat(0));
  for (std::size_t r = 0; r < basis->size(); ++r) out[r] = sym[r].evaluate(p);
  return out;
}

// ---- operators ---------------------------------------------------------------

namespace {

Matrix<GaussRat> evaluate_matrix(const Matrix<ExactPoly>& m, std::span<const GaussRat> p) {
  Matrix<GaussRat> out(m.rows(), m.cols(), GaussRat(0));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c).evaluate(p);
  }
  return out;
}

// Next k-subset of {0..n-1} in lexicographic order; false past the last one.
bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

NoetherianOperatorResult noetherian_operator(const std::vector<ExactPoly>& Ps, const NoetherianSystem& sys,
                                             const Staircase& B, SelectionPolicy policy, std::size_t minor_cap) {
  sys.validate();
  if (Ps.size() != sys.n) throw std::invalid_argument("need one polynomial P_i per x variable");
  if (B.n() != sys.n) throw std::invalid_argument("staircase dimension mismatch");
  const std::size_t k = B.size();
  const std::size_t amb = sys.ambient_dim();
  const auto basis = JetBasis::make(sys.n, k);
  const std::size_t N = basis->size();
  if (N - k > kSymbolicMinorCap) throw std::length_error("symbolic determinant too large");

  NoetherianOperatorResult res;
  res.B = B;
  res.k = k;
  res.delta = sys.delta();
  for (const auto& p : Ps) {
    if (p.n() != amb) throw std::invalid_argument("P_i must live in the ambient ring");
    res.d = std::max<std::size_t>(res.d, static_cast<std::size_t>(std::max(p.degree(), 0)));
  }
  res.bound = binomial(sys.n + k, k) * (res.d + k * res.delta);

  JetMap<ExactPoly> jets;
  for (const auto& p : Ps) jets.push_back(symbolic_leaf_jet(p, sys, basis));
  const auto T = build_T(jets, B);
  std::vector<std::size_t> mon_all;
  for (std::size_t c = k; c < T.column_count(); ++c) mon_all.push_back(c);
  const auto reduced = detail::reduced_submatrix(T, mon_all);

  // Two fixed random ambient points; a minor nonzero at either is nonzero.
  Rng rng(0x6e6f6574);
  std::vector<std::vector<GaussRat>> points(2, std::vector<GaussRat>(amb));
  for (auto& pt : points) {
    for (auto& c : pt) c = random_gauss_rational(rng, 1009);
  }
  std::vector<Matrix<GaussRat>> numeric;
  for (const auto& pt : points) numeric.push_back(evaluate_matrix(reduced, pt));

  const ExactPoly one = ExactPoly::constant(amb, GaussRat(1));
  auto emit = [&](const std::vector<std::size_t>& cols) {
    NoetherianOperator op;
    for (std::size_t j = 0; j < k; ++j) op.selected.push_back(T.label(j));
    for (std::size_t c : cols) op.selected.push_back(T.label(mon_all[c]));
    op.poly = minor_determinant(T, op.selected, one);
    op.degree = op.poly.degree();
    op.bound = res.bound;
    op.ok = op.degree <= static_cast<int>(op.bound);
    res.operators.push_back(std::move(op));
  };

  const std::size_t want = N - k;
  if (policy == SelectionPolicy::Canonical) {
    std::optional<std::vector<std::size_t>> best;
    for (const auto& m : numeric) {
      ++res.minors_checked;
      const ColumnSelection sel = select_independent_columns(m);
      if (sel.rank < want) continue;
      // Greedy bases at special points come later in lex order than the generic one.
      if (!best || sel.columns < *best) best = sel.columns;
    }
    if (best) emit(*best);
    return res;
  }

  if (want == 0) {
    ++res.minors_checked;
    emit({});
    return res;
  }
  if (mon_all.size() < want) return res;
  std::vector<std::size_t> cols(want);
  for (std::size_t i = 0; i < want; ++i) cols[i] = i;
  do {
    if (++res.minors_checked > minor_cap) throw std::length_error("too many minors to enumerate");
    bool nonzero = false;
    for (const auto& m : numeric) {
      if (!is_zero(bareiss_determinant(m.select_columns(cols), GaussRat(1)))) {
        nonzero = true;
        break;
      }
    }
    if (nonzero) emit(cols);
  } while (next_combination(cols, mon_all.size()));
  return res;
}

// ---- big bounds ----------------------------------------------------------------

namespace {

double log10_mpz(const mpz_class& z) {
  if (sgn(z) <= 0) throw std::domain_error("log of non-positive integer");
  long e = 0;
  const double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log10(m) + static_cast<double>(e) * std::log10(2.0);
}

BigBound exact_bound(mpz_class v) {
  BigBound b;
  b.log10 = log10_mpz(v);
  b.value = std::move(v);
  b.exact = true;
  return b;
}

// base^exponent, materialised when it fits.
BigBound power_bound(const mpz_class& base, const mpz_class& exponent) {
  BigBound b;
  b.power = std::make_pair(base, exponent);
  b.exact = true;
  b.log10 = exponent.get_d() * log10_mpz(base);
  const double bits = b.log10 / std::log10(2.0);
  if (bits <= static_cast<double>(kBigBoundMaxBits) && exponent.fits_ulong_p()) {
    mpz_class v;
    mpz_pow_ui(v.get_mpz_t(), base.get_mpz_t(), exponent.get_ui());
    b.value = std::move(v);
  }
  return b;
}

// RAII wrapper for an mpfr_t at a fixed precision.
class Real {
 public:
  explicit Real(mpfr_prec_t prec = 256) { mpfr_init2(v_, prec); }
  ~Real() { mpfr_clear(v_); }
  Real(const Real&) = delete;
  Real& operator=(const Real&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

// Certified upper bound from an MPFR upper value.
BigBound upper_bound_from(const Real& up) {
  BigBound b;
  b.exact = false;
  Real l;
  mpfr_log10(l.get(), up.get(), MPFR_RNDU);
  b.log10 = mpfr_get_d(l.get(), MPFR_RNDU);
  if (b.log10 / std::log10(2.0) <= static_cast<double>(kBigBoundMaxBits)) {
    mpz_class v;
    mpfr_get_z(v.get_mpz_t(), up.get(), MPFR_RNDU);
    b.value = std::move(v);
  }
  return b;
}

}  // namespace

std::string BigBound::to_string() const {
  if (value) return value->get_str();
  if (power) return power->first.get_str() + "^" + power->second.get_str();
  std::ostringstream os;
  os << "10^" << log10;
  return os.str();
}

int compare(const BigBound& a, const BigBound& b) {
  if (a.value && b.value) {
    const int c = cmp(*a.value, *b.value);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (a.power && b.power && a.power->second == b.power->second) {
    const int c = cmp(a.power->first, b.power->first);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (a.log10 < b.log10) return -1;
  if (a.log10 > b.log10) return 1;
  return 0;
}

namespace {

void require_positive(const BoundInput& inp, bool semilocal) {
  if (inp.n == 0 || inp.d == 0 || inp.delta == 0) throw std::invalid_argument("bound inputs must be positive");
  if (!semilocal && inp.m == 0) throw std::invalid_argument("bound inputs must be positive");
  if (semilocal && (inp.D == 0 || inp.N == 0 || inp.K == 0)) {
    throw std::invalid_argument("bound inputs must be positive");
  }
}

mpz_class pow_z(const mpz_class& b, unsigned long e) {
  mpz_class v;
  mpz_pow_ui(v.get_mpz_t(), b.get_mpz_t(), e);
  return v;
}

}  // namespace

GkDetail gk_bound_detail(const BoundInput& inp) {
  require_positive(inp, false);
  const unsigned long n = inp.n;
  const unsigned long m = inp.m;
  const mpz_class d(static_cast<unsigned long>(inp.d));
  const mpz_class delta(static_cast<unsigned long>(inp.delta));
  const unsigned long power = 2 * (m + n);
  // (m+1)(delta-1)[2 delta(n+m+2) - 2m - 2]^{2m+2} + 2 delta(n+2) - 2, an integer.
  const mpz_class inner = 2 * delta * (n + m + 2) - 2 * m - 2;
  const mpz_class base1 = (m + 1) * (delta - 1) * pow_z(inner, 2 * m + 2) + 2 * delta * (n + 2) - 2;

  GkDetail out;
  if (n == 1) {
    // ln 1 = 0: Q = e (e(1+m)) e^{-2} = m + 1 exactly.
    out.Q_exact = true;
    out.Q_lower = out.Q_upper = static_cast<double>(m + 1);
    const mpz_class Q(m + 1);
    const mpz_class base2 = 2 * (Q + 1) * (d + Q * (delta - 1));
    const double bits1 = static_cast<double>(power) * log10_mpz(base1) / std::log10(2.0);
    const double bits2 = static_cast<double>(power) * log10_mpz(base2) / std::log10(2.0);
    // Both bases are even, so Q/2 times the power is an integer.
    auto half_q_times = [&](const mpz_class& base, double bits) {
      if (bits > static_cast<double>(kBigBoundMaxBits)) {
        BigBound b;
        b.exact = true;
        b.log10 = log10_mpz(Q) - std::log10(2.0) + static_cast<double>(power) * log10_mpz(base);
        b.notes.push_back("(" + Q.get_str() + "/2) * " + base.get_str() + "^" + std::to_string(power));
        return b;
      }
      return exact_bound(Q * pow_z(base, power) / 2);
    };
    out.first = half_q_times(base1, bits1);
    out.second = half_q_times(base2, bits2);
  } else {
    // Q = e n (e(n+m)/sqrt n)^{ln n + 1} (n/e^2)^n, every factor rounded outward.
    Real one, e_lo, e_up, ln_lo, ln_up, sq_lo, sq_up;
    mpfr_set_ui(one.get(), 1, MPFR_RNDN);
    mpfr_exp(e_lo.get(), one.get(), MPFR_RNDD);
    mpfr_exp(e_up.get(), one.get(), MPFR_RNDU);
    Real nn;
    mpfr_set_ui(nn.get(), n, MPFR_RNDN);
    mpfr_log(ln_lo.get(), nn.get(), MPFR_RNDD);
    mpfr_log(ln_up.get(), nn.get(), MPFR_RNDU);
    mpfr_sqrt(sq_lo.get(), nn.get(), MPFR_RNDD);
    mpfr_sqrt(sq_up.get(), nn.get(), MPFR_RNDU);

    auto q_value = [&](Real& q, bool up) {
      const mpfr_rnd_t r = up ? MPFR_RNDU : MPFR_RNDD;
      const mpfr_rnd_t rr = up ? MPFR_RNDD : MPFR_RNDU;
      Real e, e_other, b, x, c, t;
      mpfr_set(e.get(), up ? e_up.get() : e_lo.get(), MPFR_RNDN);
      mpfr_set(e_other.get(), up ? e_lo.get() : e_up.get(), MPFR_RNDN);
      // b = e (n+m) / sqrt n > 1 and x = ln n + 1 >= 1, so b^x grows in both.
      mpfr_mul_ui(b.get(), e.get(), n + m, r);
      mpfr_div(b.get(), b.get(), up ? sq_lo.get() : sq_up.get(), r);
      mpfr_add_ui(x.get(), up ? ln_up.get() : ln_lo.get(), 1, r);
      mpfr_pow(b.get(), b.get(), x.get(), r);
      // (n / e^2)^n decreases in e.
      mpfr_sqr(t.get(), e_other.get(), rr);
      mpfr_ui_div(c.get(), n, t.get(), r);
      mpfr_pow_ui(c.get(), c.get(), n, r);
      mpfr_mul_ui(q.get(), e.get(), n, r);
      mpfr_mul(q.get(), q.get(), b.get(), r);
      mpfr_mul(q.get(), q.get(), c.get(), r);
    };
    Real q_lo, q_up;
    q_value(q_lo, false);
    q_value(q_up, true);
    out.Q_lower = mpfr_get_d(q_lo.get(), MPFR_RNDD);
    out.Q_upper = mpfr_get_d(q_up.get(), MPFR_RNDU);

    // Both expressions grow with Q, so Q's upper end gives upper bounds.
    Real e1, e2, t;
    mpfr_set_z(e1.get(), base1.get_mpz_t(), MPFR_RNDU);
    mpfr_pow_ui(e1.get(), e1.get(), power, MPFR_RNDU);
    mpfr_mul(e1.get(), e1.get(), q_up.get(), MPFR_RNDU);
    mpfr_div_2ui(e1.get(), e1.get(), 1, MPFR_RNDU);
    // 2 (Q+n)^n (d + Q(delta-1)).
    mpfr_mul_z(t.get(), q_up.get(), mpz_class(delta - 1).get_mpz_t(), MPFR_RNDU);
    mpfr_add_z(t.get(), t.get(), d.get_mpz_t(), MPFR_RNDU);
    mpfr_add_ui(e2.get(), q_up.get(), n, MPFR_RNDU);
    mpfr_pow_ui(e2.get(), e2.get(), n, MPFR_RNDU);
    mpfr_mul(e2.get(), e2.get(), t.get(), MPFR_RNDU);
    mpfr_mul_2ui(e2.get(), e2.get(), 1, MPFR_RNDU);
    mpfr_pow_ui(e2.get(), e2.get(), power, MPFR_RNDU);
    mpfr_mul(e2.get(), e2.get(), q_up.get(), MPFR_RNDU);
    mpfr_div_2ui(e2.get(), e2.get(), 1, MPFR_RNDU);
    out.first = upper_bound_from(e1);
    out.second = upper_bound_from(e2);
  }
  out.bound = compare(out.first, out.second) >= 0 ? out.first : out.second;
  if (!out.Q_exact) out.bound.notes.push_back("certified upper bound; Q enclosed by outward rounding");
  return out;
}

BigBound gk_bound(const BoundInput& inp) { return gk_bound_detail(inp).bound; }

BigBound bn_bound(const BoundInput& inp) {
  require_positive(inp, false);
  const mpz_class base = mpz_class(2) * static_cast<unsigned long>(inp.d) * static_cast<unsigned long>(inp.delta);
  const mpz_class exponent = mpz_class(static_cast<unsigned long>(inp.n)) *
                             pow_z(mpz_class(static_cast<unsigned long>(inp.n + 1)), 2 * inp.m) *
                             pow_z(mpz_class(static_cast<unsigned long>(inp.m + inp.n)), inp.m);
  return power_bound(base, exponent);
}

BigBound semilocal_exponent(const BoundInput& inp) {
  require_positive(inp, true);
  mpz_class binom;
  mpz_bin_uiui(binom.get_mpz_t(), inp.n + inp.K, inp.K);
  const mpz_class inner =
      binom * (mpz_class(static_cast<unsigned long>(inp.d)) +
               mpz_class(static_cast<unsigned long>(inp.K)) * static_cast<unsigned long>(inp.delta));
  const mpz_class D(static_cast<unsigned long>(inp.D));
  BigBound b = power_bound(D > inner ? D : inner, mpz_class(static_cast<unsigned long>(inp.N)));
  b.notes.push_back("binomial evaluated as C(n+K, K), lower index K rather than k");
  return b;
}

}  // namespace mop
