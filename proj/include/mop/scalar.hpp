#pragma once

// Scalar backends: exact Gaussian rationals Q(i) and complex doubles.
//
// Exact and float computations are kept apart at the type level: every
// algebraic container is parameterised on one scalar type, so mixing modes
// inside one computation does not compile.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mop {

using Complex = std::complex<double>;

/// Parse "p/q", "p", or a decimal string ("-0.125", "1e-4") into an exact rational.
mpq_class parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when q == 1) rendering.
std::string format_rational(const mpq_class& q);

class GaussRat {
 public:
  GaussRat() = default;
  GaussRat(long value) : re_(value) {}  // NOLINT(google-explicit-constructor)
  GaussRat(mpq_class re) : re_(std::move(re)) { re_.canonicalize(); }  // NOLINT(google-explicit-constructor)
  GaussRat(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussRat conj() const { return {re_, -im_}; }
  /// |z|^2, exact.
  mpq_class norm2() const { return re_ * re_ + im_ * im_; }
  /// |re| + |im|: the certified upper bound on |z| used for all exact norms.
  mpq_class abs_bound() const {
    mpq_class r = abs(re_);
    r += abs(im_);
    return r;
  }
  /// max(|re|, |im|): a certified lower bound on |z|.
  mpq_class abs_lower() const {
    mpq_class a = abs(re_);
    mpq_class b = abs(im_);
    return a > b ? a : b;
  }
  Complex to_complex() const { return {re_.get_d(), im_.get_d()}; }

  GaussRat operator-() const { return {-re_, -im_}; }
  GaussRat& operator+=(const GaussRat& o) {
    re_ += o.re_;
    if (sgn(o.im_) != 0) im_ += o.im_;
    return *this;
  }
  GaussRat& operator-=(const GaussRat& o) {
    re_ -= o.re_;
    if (sgn(o.im_) != 0) im_ -= o.im_;
    return *this;
  }
  GaussRat& operator*=(const GaussRat& o);
  GaussRat& operator/=(const GaussRat& o);

  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
  friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }
  friend std::ostream& operator<<(std::ostream& os, const GaussRat& z);

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

/// Integer power of an exact rational (negative exponents allowed for nonzero base).
mpq_class pow_rational(const mpq_class& base, long exponent);

/// Per-scalar facts used by the templated algebra.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<GaussRat> {
  static constexpr bool exact = true;
  static constexpr const char* mode_name = "exact";
  using Magnitude = mpq_class;
  static bool is_zero(const GaussRat& z) { return z.is_zero(); }
  static Magnitude abs(const GaussRat& z) { return z.abs_bound(); }
  static double abs_double(const GaussRat& z) { return std::abs(z.to_complex()); }
  static GaussRat from_rational(const mpq_class& q) { return GaussRat(q); }
  static GaussRat from_complex_parts(const mpq_class& re, const mpq_class& im) {
    return GaussRat(re, im);
  }
  static double mag_to_double(const Magnitude& m) { return m.get_d(); }
  static Magnitude mag_pow(const Magnitude& t, long e) { return pow_rational(t, e); }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static constexpr const char* mode_name = "float";
  using Magnitude = double;
  static bool is_zero(const Complex& z) { return z == Complex(0.0, 0.0); }
  static Magnitude abs(const Complex& z) { return std::abs(z); }
  static double abs_double(const Complex& z) { return std::abs(z); }
  static Complex from_rational(const mpq_class& q) { return {q.get_d(), 0.0}; }
  static Complex from_complex_parts(const mpq_class& re, const mpq_class& im) {
    return {re.get_d(), im.get_d()};
  }
  static double mag_to_double(Magnitude m) { return m; }
  static Magnitude mag_pow(Magnitude t, long e) { return std::pow(t, static_cast<double>(e)); }
};

template <class S>
using Magnitude = typename ScalarTraits<S>::Magnitude;

template <class S>
inline bool is_zero(const S& z) {
  return ScalarTraits<S>::is_zero(z);
}

/// Ring operations needed by the generic elimination code. Specialised for
/// scalars here and for polynomials in poly.hpp.
template <class R>
struct RingTraits;

template <>
struct RingTraits<GaussRat> {
  static GaussRat zero_like(const GaussRat&) { return GaussRat(); }
  static GaussRat one_like(const GaussRat&) { return GaussRat(1); }
  static bool is_zero(const GaussRat& z) { return z.is_zero(); }
  static GaussRat exact_div(const GaussRat& a, const GaussRat& b) { return a / b; }
};

template <>
struct RingTraits<Complex> {
  static Complex zero_like(const Complex&) { return {}; }
  static Complex one_like(const Complex&) { return {1.0, 0.0}; }
  static bool is_zero(const Complex& z) { return z == Complex(0.0, 0.0); }
  static Complex exact_div(const Complex& a, const Complex& b) { return a / b; }
};

}  // namespace mop
