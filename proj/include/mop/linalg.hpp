#pragma once

// Small dense linear algebra over the scalar backends (and, for
// determinants, over any integral domain with exact division).

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mop/scalar.hpp"

namespace mop {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }

  /// Submatrix on the given columns (all rows).
  Matrix select_columns(const std::vector<std::size_t>& cols) const {
    Matrix out;
    out.rows_ = rows_;
    out.cols_ = cols.size();
    out.data_.reserve(rows_ * cols.size());
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c : cols) out.data_.push_back((*this)(r, c));
    }
    return out;
  }

  template <class U, class Fn>
  Matrix<U> map(Fn&& fn) const {
    Matrix<U> out(rows_, cols_, U{});
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) out(r, c) = fn((*this)(r, c));
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Fraction-free (Bareiss) determinant over an integral domain R whose
/// RingTraits provide exact division. `one` is returned for 0x0 input.
template <class R>
R bareiss_determinant(Matrix<R> a, const R& one) {
  using RT = RingTraits<R>;
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("determinant of non-square matrix");
  if (n == 0) return one;
  bool negate = false;
  R prev = one;
  for (std::size_t k = 0; k < n; ++k) {
    if (RT::is_zero(a(k, k))) {
      std::size_t pivot = k + 1;
      while (pivot < n && RT::is_zero(a(pivot, k))) ++pivot;
      if (pivot == n) return RT::zero_like(one);
      a.swap_rows(k, pivot);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        R v = a(i, j) * a(k, k);
        if (!RT::is_zero(a(i, k)) && !RT::is_zero(a(k, j))) v -= a(i, k) * a(k, j);
        a(i, j) = (k == 0) ? std::move(v) : RT::exact_div(v, prev);
      }
    }
    prev = a(k, k);
  }
  R det = a(n - 1, n - 1);
  if (negate) det = RT::zero_like(one) - det;
  return det;
}

namespace detail {

/// Relative threshold below which a float pivot is treated as zero.
inline constexpr double kFloatRankTolerance = 1e-11;

inline double max_abs(const Matrix<Complex>& a) {
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) m = std::max(m, std::abs(a(r, c)));
  }
  return m;
}

}  // namespace detail

/// Partial-pivoted LU determinant for float matrices.
inline Complex lu_determinant(Matrix<Complex> a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("determinant of non-square matrix");
  Complex det(1.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
    }
    if (a(pivot, k) == Complex(0.0, 0.0)) return {};
    if (pivot != k) {
      a.swap_rows(pivot, k);
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a(i, k) / a(k, k);
      if (f == Complex(0.0, 0.0)) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

/// Determinant dispatched on the scalar mode: fraction-free elimination for
/// exact scalars, partial-pivoted LU for floats.
template <class S>
S determinant(const Matrix<S>& a) {
  if constexpr (ScalarTraits<S>::exact) {
    return bareiss_determinant(a, S(1));
  } else {
    return lu_determinant(a);
  }
}

/// Rank plus a set of linearly independent columns realising it.
struct ColumnSelection {
  std::size_t rank = 0;
  std::vector<std::size_t> columns;  // ascending
};

/// Exact mode: the first nonzero pivot in canonical column order (the
/// lexicographically first column basis). Float mode: complete pivoting by
/// maximal magnitude, with a relative rank tolerance.
template <class S>
ColumnSelection select_independent_columns(Matrix<S> a) {
  ColumnSelection out;
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  if constexpr (ScalarTraits<S>::exact) {
    for (std::size_t c = 0; c < cols && out.rank < rows; ++c) {
      std::size_t pivot = out.rank;
      while (pivot < rows && a(pivot, c).is_zero()) ++pivot;
      if (pivot == rows) continue;
      a.swap_rows(out.rank, pivot);
      const S inv = S(1) / a(out.rank, c);
      for (std::size_t r = out.rank + 1; r < rows; ++r) {
        if (a(r, c).is_zero()) continue;
        const S f = a(r, c) * inv;
        for (std::size_t j = c; j < cols; ++j) {
          if (!a(out.rank, j).is_zero()) a(r, j) -= f * a(out.rank, j);
        }
      }
      out.columns.push_back(c);
      ++out.rank;
    }
  } else {
    const double tol = detail::kFloatRankTolerance * std::max(1.0, detail::max_abs(a));
    std::vector<bool> used(cols, false);
    while (out.rank < rows) {
      double best = 0.0;
      std::size_t br = 0, bc = 0;
      for (std::size_t r = out.rank; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          if (used[c]) continue;
          const double v = std::abs(a(r, c));
          if (v > best) {
            best = v;
            br = r;
            bc = c;
          }
        }
      }
      if (best <= tol) break;
      a.swap_rows(out.rank, br);
      for (std::size_t r = out.rank + 1; r < rows; ++r) {
        const Complex f = a(r, bc) / a(out.rank, bc);
        if (f == Complex(0.0, 0.0)) continue;
        for (std::size_t c = 0; c < cols; ++c) a(r, c) -= f * a(out.rank, c);
      }
      used[bc] = true;
      out.columns.push_back(bc);
      ++out.rank;
    }
    std::sort(out.columns.begin(), out.columns.end());
  }
  return out;
}

template <class S>
std::size_t matrix_rank(const Matrix<S>& a) {
  return select_independent_columns(a).rank;
}

/// Gauss-Jordan inverse; std::nullopt when singular.
template <class S>
std::optional<Matrix<S>> inverse(Matrix<S> a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("inverse of non-square matrix");
  Matrix<S> inv(n, n, S(0));
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = S(1);
  double tol = 0.0;
  if constexpr (!ScalarTraits<S>::exact) tol = detail::kFloatRankTolerance * detail::max_abs(a);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    if constexpr (ScalarTraits<S>::exact) {
      while (pivot < n && a(pivot, k).is_zero()) ++pivot;
      if (pivot == n) return std::nullopt;
    } else {
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
      }
      if (std::abs(a(pivot, k)) <= tol) return std::nullopt;
    }
    a.swap_rows(k, pivot);
    inv.swap_rows(k, pivot);
    const S p = S(1) / a(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      a(k, j) *= p;
      inv(k, j) *= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || ScalarTraits<S>::is_zero(a(i, k))) continue;
      const S f = a(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        if (!ScalarTraits<S>::is_zero(a(k, j))) a(i, j) -= f * a(k, j);
        if (!ScalarTraits<S>::is_zero(inv(k, j))) inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

template <class S>
std::vector<S> mat_vec(const Matrix<S>& a, const std::vector<S>& v) {
  if (a.cols() != v.size()) throw std::invalid_argument("matrix/vector size mismatch");
  std::vector<S> out(a.rows(), S(0));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (!ScalarTraits<S>::is_zero(a(r, c)) && !ScalarTraits<S>::is_zero(v[c])) out[r] += a(r, c) * v[c];
    }
  }
  return out;
}

/// 1-norm condition number ||A||_1 ||A^{-1}||_1; +inf when singular.
inline double condition_number(const Matrix<Complex>& a) {
  auto norm1 = [](const Matrix<Complex>& m) {
    double best = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < m.rows(); ++r) s += std::abs(m(r, c));
      best = std::max(best, s);
    }
    return best;
  };
  if (a.rows() == 0) return 1.0;
  auto inv = inverse(a);
  if (!inv) return std::numeric_limits<double>::infinity();
  return norm1(a) * norm1(*inv);
}

/// Incrementally built row-echelon basis of sparse exact vectors; its size
/// is the rank of everything inserted.
class EchelonBasis {
 public:
  using SparseVector = std::map<std::size_t, GaussRat>;

  /// Reduces v against the basis; returns true if it was independent.
  bool insert(SparseVector v) {
    while (!v.empty()) {
      auto lead = v.begin();
      auto it = pivots_.find(lead->first);
      if (it == pivots_.end()) {
        const GaussRat inv = GaussRat(1) / lead->second;
        for (auto& [idx, c] : v) c *= inv;
        pivots_.emplace(lead->first, std::move(v));
        return true;
      }
      const GaussRat f = lead->second;
      for (const auto& [idx, c] : it->second) {
        auto [slot, inserted] = v.try_emplace(idx, GaussRat());
        slot->second -= f * c;
        if (slot->second.is_zero()) v.erase(slot);
      }
    }
    return false;
  }

  std::size_t rank() const { return pivots_.size(); }

 private:
  std::map<std::size_t, SparseVector> pivots_;
};

}  // namespace mop
