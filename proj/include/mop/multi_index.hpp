#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace mop {

/// Exponent vector of a monomial x^a in at most kMaxVars variables.
class MultiIndex {
 public:
  static constexpr std::size_t kMaxVars = 8;

  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : n_(checked_dim(n)) {}
  MultiIndex(std::initializer_list<unsigned> exps);
  explicit MultiIndex(const std::vector<unsigned>& exps);

  static MultiIndex unit(std::size_t n, std::size_t i) {
    MultiIndex m(n);
    m.set(i, 1);
    return m;
  }

  std::size_t size() const { return n_; }
  unsigned operator[](std::size_t i) const { return e_[i]; }
  void set(std::size_t i, unsigned v) {
    if (v > UINT16_MAX) throw std::overflow_error("exponent overflow");
    e_[i] = static_cast<std::uint16_t>(v);
  }
  unsigned degree() const {
    unsigned d = 0;
    for (std::size_t i = 0; i < n_; ++i) d += e_[i];
    return d;
  }
  bool is_zero() const { return degree() == 0; }

  /// Componentwise a <= b.
  bool divides(const MultiIndex& b) const;
  std::vector<unsigned> to_vector() const { return {e_.begin(), e_.begin() + n_}; }

  MultiIndex& operator+=(const MultiIndex& o);
  /// Componentwise difference; requires o.divides(*this).
  MultiIndex& operator-=(const MultiIndex& o);
  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) { return a += b; }
  friend MultiIndex operator-(MultiIndex a, const MultiIndex& b) { return a -= b; }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.n_ == b.n_ && a.e_ == b.e_;
  }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
  friend std::ostream& operator<<(std::ostream& os, const MultiIndex& m);

 private:
  static std::uint8_t checked_dim(std::size_t n) {
    if (n > kMaxVars) throw std::invalid_argument("too many variables (max 8)");
    return static_cast<std::uint8_t>(n);
  }

  std::array<std::uint16_t, kMaxVars> e_{};
  std::uint8_t n_ = 0;
};

/// Canonical basis order: total degree ascending, then within one degree a
/// larger x_1 exponent first (x_1 > x_2 > ... lexicographically). This is a
/// monomial order, so the largest element is a valid leading term.
struct GrlexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

/// C(n, k) with overflow detection.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// dim J_{n,k} = C(n+k, n).
std::size_t jet_dim(std::size_t n, std::size_t k);

/// Position of a in the canonical order of monomials of degree <= k.
/// Throws std::out_of_range when |a| > k.
std::size_t grlex_rank(const MultiIndex& a, std::size_t k);

/// All monomials in n variables of degree <= k, in canonical order.
std::vector<MultiIndex> monomials_up_to(std::size_t n, std::size_t k);

/// All monomials in n variables of degree exactly d, in canonical order.
std::vector<MultiIndex> monomials_of_degree(std::size_t n, std::size_t d);

}  // namespace mop
