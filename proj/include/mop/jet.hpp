#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "mop/multi_index.hpp"
#include "mop/poly.hpp"

namespace mop {

/// The monomial basis of J_{n,k} in canonical order.
class JetBasis {
 public:
  JetBasis(std::size_t n, std::size_t k) : n_(n), k_(k), monomials_(monomials_up_to(n, k)) {}

  static std::shared_ptr<const JetBasis> make(std::size_t n, std::size_t k) {
    return std::make_shared<const JetBasis>(n, k);
  }

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t size() const { return monomials_.size(); }
  const MultiIndex& monomial(std::size_t rank) const { return monomials_.at(rank); }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }
  std::size_t rank(const MultiIndex& m) const { return grlex_rank(m, k_); }

  friend bool operator==(const JetBasis& a, const JetBasis& b) { return a.n_ == b.n_ && a.k_ == b.k_; }

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<MultiIndex> monomials_;
};

using JetBasisPtr = std::shared_ptr<const JetBasis>;

/// Element of J_{n,k} with coefficients in a commutative ring R (a scalar,
/// or a polynomial ring when the base point is symbolic).
template <class R>
class Jet {
 public:
  Jet(JetBasisPtr basis, const R& zero) : basis_(std::move(basis)), coeffs_(basis_->size(), zero) {}
  Jet(JetBasisPtr basis, std::vector<R> coeffs) : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != basis_->size()) throw std::invalid_argument("jet coefficient count mismatch");
  }

  /// j^k of a polynomial with scalar coefficients.
  template <class S>
  static Jet from_poly(JetBasisPtr basis, const Poly<S>& p) {
    if (p.n() != basis->n()) throw std::invalid_argument("jet/polynomial dimension mismatch");
    Jet j(basis, R(0));
    for (const auto& [m, c] : p.terms()) {
      if (m.degree() > basis->k()) break;
      j.coeffs_[basis->rank(m)] = c;
    }
    return j;
  }

  const JetBasis& basis() const { return *basis_; }
  const JetBasisPtr& basis_ptr() const { return basis_; }
  std::size_t n() const { return basis_->n(); }
  std::size_t k() const { return basis_->k(); }
  const std::vector<R>& coeffs() const { return coeffs_; }
  const R& operator[](std::size_t rank) const { return coeffs_[rank]; }
  R& operator[](std::size_t rank) { return coeffs_[rank]; }
  const R& coeff(const MultiIndex& m) const { return coeffs_[basis_->rank(m)]; }

  bool is_zero() const {
    for (const auto& c : coeffs_) {
      if (!RingTraits<R>::is_zero(c)) return false;
    }
    return true;
  }

  Jet& operator+=(const Jet& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend bool operator==(const Jet& a, const Jet& b) {
    return *a.basis_ == *b.basis_ && a.coeffs_ == b.coeffs_;
  }

  /// x^a * f truncated at order k.
  Jet shifted(const MultiIndex& a) const {
    Jet r(basis_, RingTraits<R>::zero_like(coeffs_.front()));
    const std::size_t k = basis_->k();
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (RingTraits<R>::is_zero(coeffs_[i])) continue;
      const MultiIndex m = basis_->monomial(i) + a;
      if (m.degree() > k) continue;
      r.coeffs_[basis_->rank(m)] = coeffs_[i];
    }
    return r;
  }

  template <class S>
  Poly<S> to_poly() const {
    Poly<S> p(basis_->n());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) p.add_term(basis_->monomial(i), coeffs_[i]);
    return p;
  }

  void check_compatible(const Jet& o) const {
    if (!(*basis_ == *o.basis_)) throw std::invalid_argument("jet dimension/order mismatch");
  }

 private:
  JetBasisPtr basis_;
  std::vector<R> coeffs_;
};

/// Product in J_{n,k}: convolution with every term of degree > k discarded.
template <class R>
Jet<R> jet_mul_trunc(const Jet<R>& f, const Jet<R>& g) {
  f.check_compatible(g);
  const JetBasis& basis = f.basis();
  const std::size_t k = basis.k();
  Jet<R> r(f.basis_ptr(), RingTraits<R>::zero_like(f[0]));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (RingTraits<R>::is_zero(f[i])) continue;
    const MultiIndex& mi = basis.monomial(i);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const MultiIndex& mj = basis.monomial(j);
      if (mi.degree() + mj.degree() > k) break;  // later ranks have degree >= this one
      if (RingTraits<R>::is_zero(g[j])) continue;
      r[basis.rank(mi + mj)] += f[i] * g[j];
    }
  }
  return r;
}

/// n jets sharing one basis: the k-jet of a map F.
template <class R>
using JetMap = std::vector<Jet<R>>;

template <class R>
void check_jet_map(const JetMap<R>& F) {
  if (F.empty()) throw std::invalid_argument("empty jet map");
  const JetBasis& b = F.front().basis();
  if (F.size() != b.n()) throw std::invalid_argument("jet map must have n components");
  for (const auto& f : F) {
    if (!(f.basis() == b)) throw std::invalid_argument("jet map components disagree on (n, k)");
  }
}

/// k-jet at p of a polynomial map: taylor_shift to p, then truncate.
template <class S>
JetMap<S> jet_at(const PolySystem<S>& F, std::span<const S> p, const JetBasisPtr& basis) {
  JetMap<S> out;
  out.reserve(F.size());
  for (const auto& f : F) out.push_back(Jet<S>::from_poly(basis, f.taylor_shift(p)));
  return out;
}

/// k-jet at a symbolic base point: the coefficient of y^a in f(p + y) is the
/// polynomial (1/a!) d^a f / dx^a in the base-point coordinates p.
template <class S>
JetMap<Poly<S>> symbolic_jet(const PolySystem<S>& F, const JetBasisPtr& basis) {
  const std::size_t n = basis->n();
  JetMap<Poly<S>> out;
  for (const auto& f : F) {
    if (f.n() != n) throw std::invalid_argument("symbolic jet dimension mismatch");
    Jet<Poly<S>> j(basis, Poly<S>(n));
    for (std::size_t r = 0; r < basis->size(); ++r) {
      const MultiIndex& a = basis->monomial(r);
      Poly<S> d = f;
      S factorial(1);
      for (std::size_t i = 0; i < n; ++i) {
        for (unsigned e = 1; e <= a[i]; ++e) {
          d = d.derivative(i);
          factorial *= S(static_cast<long>(e));
        }
      }
      d *= S(1) / factorial;
      j[r] = std::move(d);
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace mop
