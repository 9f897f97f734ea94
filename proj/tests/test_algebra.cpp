#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "mop/jet.hpp"
#include "support.hpp"

using namespace mop;
using testsupport::poly;
using testsupport::q;

namespace {

// Oracle order: compare (degree, then exponent vectors with larger leading entries first).
bool oracle_before(const MultiIndex& a, const MultiIndex& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return a.to_vector() > b.to_vector();
}

std::vector<MultiIndex> brute_monomials(std::size_t n, unsigned k) {
  std::vector<MultiIndex> out;
  std::vector<unsigned> e(n, 0);
  while (true) {
    unsigned d = 0;
    for (unsigned v : e) d += v;
    if (d <= k) out.emplace_back(e);
    std::size_t i = 0;
    while (i < n && ++e[i] > k) e[i++] = 0;
    if (i == n) break;
  }
  std::sort(out.begin(), out.end(), oracle_before);
  return out;
}

}  // namespace

TEST_CASE("grlex rank small cases") {
  CHECK(grlex_rank(MultiIndex{0, 0}, 2) == 0);
  CHECK(grlex_rank(MultiIndex{1, 0}, 2) == 1);
  CHECK(grlex_rank(MultiIndex{0, 1}, 2) == 2);
  CHECK(grlex_rank(MultiIndex{1, 1}, 2) == 4);
  CHECK(grlex_rank(MultiIndex{3}, 3) == 3);
  CHECK_THROWS_AS(grlex_rank(MultiIndex{2, 2}, 3), std::out_of_range);
}

TEST_CASE("grlex rank is a bijection matching a sorted enumeration") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (unsigned k = 0; k <= 4; ++k) {
      auto mons = brute_monomials(n, k);
      REQUIRE(mons.size() == jet_dim(n, k));
      for (std::size_t r = 0; r < mons.size(); ++r) CHECK(grlex_rank(mons[r], k) == r);
      CHECK(monomials_up_to(n, k) == mons);
    }
  }
  CHECK(jet_dim(3, 2) == 10);
}

TEST_CASE("jet products truncate") {
  auto b12 = JetBasis::make(1, 2);
  auto one_plus_x = Jet<GaussRat>::from_poly(b12, poly(1, {{{0}, "1"}, {{1}, "1"}}));
  CHECK(jet_mul_trunc(one_plus_x, one_plus_x).to_poly<GaussRat>() ==
        poly(1, {{{0}, "1"}, {{1}, "2"}, {{2}, "1"}}));

  auto b11 = JetBasis::make(1, 1);
  auto x = Jet<GaussRat>::from_poly(b11, poly(1, {{{1}, "1"}}));
  CHECK(jet_mul_trunc(x, x).is_zero());

  auto b22 = JetBasis::make(2, 2);
  auto f = Jet<GaussRat>::from_poly(b22, poly(2, {{{0, 0}, "1"}, {{1, 0}, "1"}, {{0, 1}, "1"}}));
  auto g = Jet<GaussRat>::from_poly(b22, poly(2, {{{0, 0}, "1"}, {{1, 0}, "-1"}}));
  CHECK(jet_mul_trunc(f, g).to_poly<GaussRat>() ==
        poly(2, {{{0, 0}, "1"}, {{0, 1}, "1"}, {{2, 0}, "-1"}, {{1, 1}, "-1"}}));

  CHECK_THROWS_AS(jet_mul_trunc(x, one_plus_x), std::invalid_argument);
}

TEST_CASE("jet ring axioms hold exactly") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const unsigned k = static_cast<unsigned>(trial % 5);
    auto basis = JetBasis::make(n, k);
    auto J = [&] { return Jet<GaussRat>::from_poly(basis, testsupport::random_poly(rng, n, 0, k, true)); };
    auto a = J(), b = J(), c = J();
    CHECK(jet_mul_trunc(jet_mul_trunc(a, b), c) == jet_mul_trunc(a, jet_mul_trunc(b, c)));
    CHECK(jet_mul_trunc(a, b + c) == jet_mul_trunc(a, b) + jet_mul_trunc(a, c));
    CHECK(jet_mul_trunc(a, b) == jet_mul_trunc(b, a));
    // Independent route: full product, then truncate.
    auto full = a.to_poly<GaussRat>() * b.to_poly<GaussRat>();
    CHECK(jet_mul_trunc(a, b).to_poly<GaussRat>() == full.truncated(k));
  }
}

TEST_CASE("taylor shift") {
  auto x2 = poly(1, {{{2}, "1"}});
  std::vector<GaussRat> one{GaussRat(1)};
  CHECK(x2.taylor_shift(one) == poly(1, {{{0}, "1"}, {{1}, "2"}, {{2}, "1"}}));

  auto xy = poly(2, {{{1, 1}, "1"}});
  std::vector<GaussRat> p{GaussRat(1), GaussRat(2)};
  CHECK(xy.taylor_shift(p) == poly(2, {{{0, 0}, "2"}, {{1, 0}, "2"}, {{0, 1}, "1"}, {{1, 1}, "1"}}));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 3;
    auto f = testsupport::random_poly(rng, n, 0, 4, true);
    std::vector<GaussRat> zero(n), a(n), b(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = testsupport::small_gaussian(rng);
      b[i] = testsupport::small_gaussian(rng);
      ab[i] = a[i] + b[i];
    }
    CHECK(f.taylor_shift(zero) == f);
    CHECK(f.taylor_shift(a).taylor_shift(b) == f.taylor_shift(ab));
    // g(y) = f(a + y): check at y = b by direct evaluation.
    CHECK(f.taylor_shift(a).evaluate(b) == f.evaluate(ab));
  }
}

TEST_CASE("weighted norms") {
  auto f = poly(1, {{{1}, "1"}, {{2}, "2"}});
  CHECK(f.norm_weighted(mpq_class(1, 2)) == 1);
  CHECK(ExactPoly(2).norm_weighted(mpq_class(1, 3)) == 0);
  CHECK_THROWS_AS(f.norm_weighted(mpq_class(0)), std::invalid_argument);
  CHECK(f.norm_weighted(mpq_class(1)) == f.norm_l1());

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 2;
    auto a = testsupport::random_poly(rng, n, 0, 3, true);
    auto b = testsupport::random_poly(rng, n, 0, 3, true);
    mpq_class t(1 + trial % 4, 4);
    CHECK((a * b).norm_weighted(t) <= a.norm_weighted(t) * b.norm_weighted(t));
  }
}

TEST_CASE("norm of a function vanishing to order k+1 scales like t^(k+1)") {
  // For j^k f = 0 and ||f||_{l1} <= 1: ||f||_t <= t^{k+1} 2^{k+n+1}, 0 < t <= 1/2.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const unsigned k = static_cast<unsigned>(trial % 3);
    auto f = testsupport::random_poly(rng, n, k + 1, k + 4);
    if (f.is_zero()) continue;
    f *= GaussRat(mpq_class(1) / f.norm_l1());
    for (int den : {2, 3, 8, 100}) {
      mpq_class t(1, den);
      mpq_class bound = pow_rational(t, k + 1) * pow_rational(mpq_class(2), static_cast<long>(k + n + 1));
      CHECK(f.norm_weighted(t) <= bound);
    }
  }
}

TEST_CASE("exact division and rational parsing") {
  auto a = poly(2, {{{1, 0}, "1"}, {{0, 1}, "1"}});
  auto b = poly(2, {{{1, 0}, "1"}, {{0, 1}, "-1"}, {{0, 0}, "3"}});
  CHECK(exact_divide(a * b, b) == a);
  CHECK_THROWS_AS(exact_divide(a * b + ExactPoly::constant(2, GaussRat(1)), b), std::domain_error);
  CHECK(parse_rational("-0.125") == mpq_class(-1, 8));
  CHECK(parse_rational("1e-4") == mpq_class(1, 10000));
  CHECK(parse_rational("6/4") == mpq_class(3, 2));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
}
