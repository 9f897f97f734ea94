#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mop/multi_index.hpp"
#include "mop/scalar.hpp"

namespace mop {

/// Sparse polynomial over S in a fixed number of variables. No zero
/// coefficient is ever stored; terms are kept in canonical (grlex) order.
template <class S>
class Poly {
 public:
  using Terms = std::map<MultiIndex, S, GrlexLess>;

  Poly() = default;
  explicit Poly(std::size_t n) : n_(n) {}

  static Poly constant(std::size_t n, const S& c) {
    Poly p(n);
    p.add_term(MultiIndex(n), c);
    return p;
  }
  static Poly monomial(const MultiIndex& m, const S& c = S(1)) {
    Poly p(m.size());
    p.add_term(m, c);
    return p;
  }
  static Poly variable(std::size_t n, std::size_t i) { return monomial(MultiIndex::unit(n, i)); }

  std::size_t n() const { return n_; }
  const Terms& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.rbegin()->first.degree()); }
  /// Lowest degree among the terms; -1 for the zero polynomial.
  int min_degree() const {
    return terms_.empty() ? -1 : static_cast<int>(terms_.begin()->first.degree());
  }

  S coeff(const MultiIndex& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? S(0) : it->second;
  }

  void add_term(const MultiIndex& m, const S& c) {
    if (m.size() != n_) throw std::invalid_argument("term dimension mismatch");
    if (ScalarTraits<S>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (ScalarTraits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  Poly operator-() const {
    Poly r(n_);
    for (const auto& [m, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), m, -c);
    return r;
  }
  Poly& operator+=(const Poly& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Poly& operator*=(const S& s) {
    if (ScalarTraits<S>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const S& s) { return a *= s; }
  friend Poly operator*(const S& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_dim(b);
    Poly r(a.n_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma + mb, ca * cb);
    }
    return r;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  /// Multiply by the monomial x^m.
  Poly shifted(const MultiIndex& m) const {
    Poly r(n_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e + m, c);
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// j^k: terms of degree <= k.
  Poly truncated(std::size_t k) const {
    Poly r(n_);
    for (const auto& [m, c] : terms_) {
      if (m.degree() > k) break;
      r.terms_.emplace_hint(r.terms_.end(), m, c);
    }
    return r;
  }
  /// Terms of degree > k (the part lying in m^{k+1}).
  Poly tail(std::size_t k) const {
    Poly r(n_);
    for (const auto& [m, c] : terms_) {
      if (m.degree() > k) r.terms_.emplace_hint(r.terms_.end(), m, c);
    }
    return r;
  }

  S evaluate(std::span<const S> point) const {
    if (point.size() != n_) throw std::invalid_argument("evaluation point dimension mismatch");
    S total(0);
    for (const auto& [m, c] : terms_) {
      S v = c;
      for (std::size_t i = 0; i < n_; ++i) {
        for (unsigned e = 0; e < m[i]; ++e) v *= point[i];
      }
      total += v;
    }
    return total;
  }

  Poly derivative(std::size_t var) const {
    Poly r(n_);
    for (const auto& [m, c] : terms_) {
      if (m[var] == 0) continue;
      MultiIndex d = m;
      d.set(var, m[var] - 1);
      r.add_term(d, c * S(static_cast<long>(m[var])));
    }
    return r;
  }

  /// Composition f(g_1, ..., g_n); all images share one target dimension.
  Poly compose(const std::vector<Poly>& images) const {
    if (images.size() != n_) throw std::invalid_argument("composition arity mismatch");
    const std::size_t target = images.empty() ? 0 : images.front().n();
    std::vector<std::vector<Poly>> powers(n_);
    for (std::size_t i = 0; i < n_; ++i) powers[i].push_back(Poly::constant(target, S(1)));
    Poly r(target);
    for (const auto& [m, c] : terms_) {
      Poly term = Poly::constant(target, c);
      for (std::size_t i = 0; i < n_; ++i) {
        while (powers[i].size() <= m[i]) powers[i].push_back(powers[i].back() * images[i]);
        if (m[i] > 0) term = term * powers[i][m[i]];
      }
      r += term;
    }
    return r;
  }

  /// g(y) = f(p + y).
  Poly taylor_shift(std::span<const S> p) const {
    if (p.size() != n_) throw std::invalid_argument("shift point dimension mismatch");
    std::vector<Poly> images;
    images.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      images.push_back(Poly::variable(n_, i) + Poly::constant(n_, p[i]));
    }
    return compose(images);
  }

  /// ||f||_t = sum t^{|a|} |c_a|, with |c| the scalar backend's magnitude.
  Magnitude<S> norm_weighted(const Magnitude<S>& t) const {
    if (!(t > 0)) throw std::invalid_argument("weight t must be positive");
    Magnitude<S> total(0);
    Magnitude<S> tp(1);
    unsigned tp_deg = 0;
    for (const auto& [m, c] : terms_) {
      while (tp_deg < m.degree()) {
        tp *= t;
        ++tp_deg;
      }
      total += tp * ScalarTraits<S>::abs(c);
    }
    return total;
  }
  Magnitude<S> norm_l1() const {
    Magnitude<S> total(0);
    for (const auto& [m, c] : terms_) total += ScalarTraits<S>::abs(c);
    return total;
  }

  /// Exact quotient a / b; throws std::domain_error when b does not divide a.
  friend Poly exact_divide(const Poly& a, const Poly& b) {
    a.check_dim(b);
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    Poly q(a.n_);
    Poly r = a;
    const auto& [lead_m, lead_c] = *b.terms_.rbegin();
    while (!r.is_zero()) {
      const auto& [rm, rc] = *r.terms_.rbegin();
      if (!lead_m.divides(rm)) throw std::domain_error("polynomial division is not exact");
      const MultiIndex qm = rm - lead_m;
      const S qc = rc / lead_c;
      q.add_term(qm, qc);
      Poly step = b.shifted(qm);
      step *= qc;
      r -= step;
    }
    return q;
  }

  template <class T, class Fn>
  Poly<T> map_coefficients(Fn&& fn) const {
    Poly<T> r(n_);
    for (const auto& [m, c] : terms_) r.add_term(m, fn(c));
    return r;
  }

 private:
  void check_dim(const Poly& o) const {
    if (o.n_ != n_) throw std::invalid_argument("polynomial dimension mismatch");
  }

  std::size_t n_ = 0;
  Terms terms_;
};

template <class S>
struct RingTraits<Poly<S>> {
  static Poly<S> zero_like(const Poly<S>& p) { return Poly<S>(p.n()); }
  static Poly<S> one_like(const Poly<S>& p) { return Poly<S>::constant(p.n(), S(1)); }
  static bool is_zero(const Poly<S>& p) { return p.is_zero(); }
  static Poly<S> exact_div(const Poly<S>& a, const Poly<S>& b) { return exact_divide(a, b); }
};

using ExactPoly = Poly<GaussRat>;
using FloatPoly = Poly<Complex>;

inline FloatPoly to_float(const ExactPoly& p) {
  return p.map_coefficients<Complex>([](const GaussRat& c) { return c.to_complex(); });
}

/// A system F = (f_1, ..., f_q) of polynomials sharing one dimension.
template <class S>
using PolySystem = std::vector<Poly<S>>;

template <class S>
std::size_t system_dim(const PolySystem<S>& F) {
  if (F.empty()) throw std::invalid_argument("empty polynomial system");
  const std::size_t n = F.front().n();
  for (const auto& f : F) {
    if (f.n() != n) throw std::invalid_argument("polynomial system dimension mismatch");
  }
  return n;
}

}  // namespace mop
