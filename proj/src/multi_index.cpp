#include "mop/multi_index.hpp"

#include <limits>
#include <numeric>

namespace mop {

MultiIndex::MultiIndex(std::initializer_list<unsigned> exps) : n_(checked_dim(exps.size())) {
  std::size_t i = 0;
  for (unsigned e : exps) set(i++, e);
}

MultiIndex::MultiIndex(const std::vector<unsigned>& exps) : n_(checked_dim(exps.size())) {
  for (std::size_t i = 0; i < exps.size(); ++i) set(i, exps[i]);
}

bool MultiIndex::divides(const MultiIndex& b) const {
  if (n_ != b.n_) return false;
  for (std::size_t i = 0; i < n_; ++i) {
    if (e_[i] > b.e_[i]) return false;
  }
  return true;
}

MultiIndex& MultiIndex::operator+=(const MultiIndex& o) {
  if (n_ != o.n_) throw std::invalid_argument("multi-index dimension mismatch");
  for (std::size_t i = 0; i < n_; ++i) set(i, static_cast<unsigned>(e_[i]) + o.e_[i]);
  return *this;
}

MultiIndex& MultiIndex::operator-=(const MultiIndex& o) {
  if (!o.divides(*this)) throw std::invalid_argument("multi-index subtraction underflow");
  for (std::size_t i = 0; i < n_; ++i) e_[i] = static_cast<std::uint16_t>(e_[i] - o.e_[i]);
  return *this;
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& m) {
  os << "[";
  for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
  return os << "]";
}

bool GrlexLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const unsigned da = a.degree();
  const unsigned db = b.degree();
  if (da != db) return da < db;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // r * num / i is exact at every step; divide first where possible.
    const std::uint64_t g = std::gcd(r, i);
    const std::uint64_t rr = r / g;
    const std::uint64_t ii = i / g;
    const std::uint64_t nn = num / ii;
    if (rr != 0 && nn > std::numeric_limits<std::uint64_t>::max() / rr) {
      throw std::overflow_error("binomial coefficient overflow");
    }
    r = rr * nn;
  }
  return r;
}

std::size_t jet_dim(std::size_t n, std::size_t k) {
  return static_cast<std::size_t>(binomial(n + k, n));
}

std::size_t grlex_rank(const MultiIndex& a, std::size_t k) {
  const std::size_t n = a.size();
  const unsigned d = a.degree();
  if (d > k) throw std::out_of_range("monomial degree exceeds jet order");
  if (n == 0) return 0;
  // Monomials of degree < d.
  std::size_t rank = d == 0 ? 0 : jet_dim(n, d - 1);
  // Monomials of degree d that precede a: same prefix, larger exponent at slot i.
  unsigned remaining = d;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t tail_vars = n - i - 1;
    for (unsigned e = a[i] + 1; e <= remaining; ++e) {
      // Distribute remaining - e among tail_vars variables.
      rank += static_cast<std::size_t>(binomial(remaining - e + tail_vars - 1, tail_vars - 1));
    }
    remaining -= a[i];
  }
  return rank;
}

namespace {

void fill_degree(std::size_t n, std::size_t slot, unsigned remaining, MultiIndex& cur,
                 std::vector<MultiIndex>& out) {
  if (slot + 1 == n) {
    cur.set(slot, remaining);
    out.push_back(cur);
    return;
  }
  for (unsigned e = remaining + 1; e-- > 0;) {
    cur.set(slot, e);
    fill_degree(n, slot + 1, remaining - e, cur, out);
  }
  cur.set(slot, 0);
}

}  // namespace

std::vector<MultiIndex> monomials_of_degree(std::size_t n, std::size_t d) {
  std::vector<MultiIndex> out;
  if (n == 0) {
    if (d == 0) out.emplace_back(0);
    return out;
  }
  MultiIndex cur(n);
  fill_degree(n, 0, static_cast<unsigned>(d), cur, out);
  return out;
}

std::vector<MultiIndex> monomials_up_to(std::size_t n, std::size_t k) {
  std::vector<MultiIndex> out;
  out.reserve(jet_dim(n, k));
  for (std::size_t d = 0; d <= k; ++d) {
    auto layer = monomials_of_degree(n, d);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

}  // namespace mop
