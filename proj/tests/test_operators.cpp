#include <catch_amalgamated.hpp>

#include <random>

#include "mop/operators.hpp"
#include "mop/oracle.hpp"
#include "suites.hpp"
#include "support.hpp"

using namespace mop;
using testsupport::poly;
using testsupport::q;

namespace {

using Sys = PolySystem<GaussRat>;

std::vector<GaussRat> origin(std::size_t n) { return std::vector<GaussRat>(n, GaussRat()); }

Sys eta_example(const std::string& eta) { return {poly(1, {{{1}, eta}, {{2}, "1"}})}; }

Staircase stair1(std::initializer_list<unsigned> exps) {
  std::vector<MultiIndex> el;
  for (unsigned e : exps) el.push_back(MultiIndex{e});
  return Staircase(1, el);
}

template <class S>
std::vector<S> column(const MultiplicityMatrix<S>& T, const ColumnLabel& l) {
  std::vector<S> c;
  for (std::size_t r = 0; r < T.N(); ++r) c.push_back(T.entries(r, T.column(l)));
  return c;
}

// Independent determinant: Laplace expansion along the first row.
GaussRat laplace(const Matrix<GaussRat>& a) {
  const std::size_t n = a.rows();
  if (n == 0) return GaussRat(1);
  GaussRat total;
  for (std::size_t c = 0; c < n; ++c) {
    if (a(0, c).is_zero()) continue;
    Matrix<GaussRat> sub(n - 1, n - 1, GaussRat());
    for (std::size_t r = 1; r < n; ++r) {
      for (std::size_t j = 0, jj = 0; j < n; ++j) {
        if (j != c) sub(r - 1, jj++) = a(r, j);
      }
    }
    GaussRat term = a(0, c) * laplace(sub);
    total += (c % 2 == 0) ? term : -term;
  }
  return total;
}

}  // namespace

TEST_CASE("T matrix columns for the eta example") {
  auto basis = JetBasis::make(1, 1);
  auto T = build_T(jet_at(eta_example("5/7"), std::span<const GaussRat>(origin(1)), basis), stair1({0}));
  REQUIRE(T.column_count() == 1 + 1 * 2);
  CHECK(column(T, ColumnLabel::basis(MultiIndex{0})) == std::vector<GaussRat>{1, 0});
  CHECK(column(T, ColumnLabel::monomial(0, MultiIndex{0})) == std::vector<GaussRat>{0, q("5/7")});
  CHECK(column(T, ColumnLabel::monomial(0, MultiIndex{1})) == std::vector<GaussRat>{0, 0});

  auto basis2 = JetBasis::make(1, 2);
  auto T2 = build_T(jet_at(eta_example("5/7"), std::span<const GaussRat>(origin(1)), basis2), stair1({0, 1}));
  CHECK(column(T2, ColumnLabel::monomial(0, MultiIndex{0})) == std::vector<GaussRat>{0, q("5/7"), 1});
  CHECK(column(T2, ColumnLabel::monomial(0, MultiIndex{1})) == std::vector<GaussRat>{0, 0, q("5/7")});
  CHECK(column(T2, ColumnLabel::monomial(0, MultiIndex{2})) == std::vector<GaussRat>{0, 0, 0});
  CHECK_THROWS_AS(build_T(jet_at(eta_example("1"), std::span<const GaussRat>(origin(1)), basis2), stair1({0})),
                  std::invalid_argument);
}

TEST_CASE("identity map T has unit columns") {
  Sys F{poly(2, {{{1, 0}, "1"}}), poly(2, {{{0, 1}, "1"}})};
  auto basis = JetBasis::make(2, 1);
  auto T = build_T(jet_at(F, std::span<const GaussRat>(origin(2)), basis), Staircase(2, {MultiIndex{0, 0}}));
  CHECK(column(T, ColumnLabel::basis(MultiIndex{0, 0})) == std::vector<GaussRat>{1, 0, 0});
  CHECK(column(T, ColumnLabel::monomial(0, MultiIndex{0, 0})) == std::vector<GaussRat>{0, 1, 0});
  CHECK(column(T, ColumnLabel::monomial(1, MultiIndex{0, 0})) == std::vector<GaussRat>{0, 0, 1});
  auto w = witness_minor(T);
  CHECK(w.rank == 3);
  CHECK(w.det == GaussRat(1));
}

TEST_CASE("eta example witnesses") {
  const auto F = eta_example("1/2");
  auto r1 = mult_exceeds(F, std::span<const GaussRat>(origin(1)), 1);
  REQUIRE_FALSE(r1.exceeds);
  CHECK(r1.witness->det == q("1/2"));
  CHECK(r1.s == 0.5);

  auto r2 = mult_exceeds(F, std::span<const GaussRat>(origin(1)), 2);
  REQUIRE_FALSE(r2.exceeds);
  CHECK((r2.witness->det == GaussRat(1) || r2.witness->det == GaussRat(-1)));
  CHECK(r2.witness->homogeneity == 1);
}

TEST_CASE("vanishing first jets give rank deficiency") {
  Sys F{poly(2, {{{2, 0}, "1"}}), poly(2, {{{0, 2}, "1"}})};
  auto basis = JetBasis::make(2, 1);
  auto w = witness_minor(build_T(jet_at(F, std::span<const GaussRat>(origin(2)), basis),
                                 Staircase(2, {MultiIndex{0, 0}})));
  CHECK(w.rank == 1);
  CHECK(w.det.is_zero());
  CHECK(w.selected.empty());

  CHECK(mult_exceeds(F, std::span<const GaussRat>(origin(2)), 3).exceeds);
  auto r4 = mult_exceeds(F, std::span<const GaussRat>(origin(2)), 4);
  REQUIRE_FALSE(r4.exceeds);
  CHECK(r4.witness->B == Staircase(2, {MultiIndex{0, 0}, MultiIndex{1, 0}, MultiIndex{0, 1}, MultiIndex{1, 1}}));

  Sys id{poly(2, {{{1, 0}, "1"}}), poly(2, {{{0, 1}, "1"}})};
  CHECK_FALSE(mult_exceeds(id, std::span<const GaussRat>(origin(2)), 1).exceeds);
}

TEST_CASE("basic minors of x^2 - eps^2") {
  Sys F{poly(1, {{{2}, "1"}, {{0}, "-1/9"}})};
  auto basis = JetBasis::make(1, 1);
  auto T = build_T(jet_at(F, std::span<const GaussRat>(origin(1)), basis), stair1({0}));
  const ColumnLabel b = ColumnLabel::basis(MultiIndex{0});
  GaussRat m1 = minor_determinant(T, {b, ColumnLabel::monomial(0, MultiIndex{0})}, GaussRat(1));
  GaussRat m2 = minor_determinant(T, {b, ColumnLabel::monomial(0, MultiIndex{1})}, GaussRat(1));
  CHECK(m1.is_zero());
  CHECK(m2 == q("-1/9"));
  auto w = witness_minor(T);
  CHECK(w.magnitude() == Catch::Approx(1.0 / 9));
}

TEST_CASE("convex combination of operators") {
  const auto F = eta_example("1/3");
  auto B = stair1({0, 1});
  std::vector<GaussRat> p = origin(1);
  // The two k = 2 minors: u = 1 gives 1, u = x gives eta.
  OperatorSpec a{B, {ColumnLabel::basis(MultiIndex{0}), ColumnLabel::basis(MultiIndex{1}),
                     ColumnLabel::monomial(0, MultiIndex{0})}};
  OperatorSpec b{B, {ColumnLabel::basis(MultiIndex{0}), ColumnLabel::basis(MultiIndex{1}),
                     ColumnLabel::monomial(0, MultiIndex{1})}};
  const GaussRat va = evaluate_operator(F, a.B, a.selected, std::span<const GaussRat>(p));
  const GaussRat vb = evaluate_operator(F, b.B, b.selected, std::span<const GaussRat>(p));
  CHECK(va == GaussRat(1));
  CHECK(vb == q("1/3"));
  const GaussRat half = q("1/2");
  CHECK(evaluate_operator(F, {a, b}, {half, half}, std::span<const GaussRat>(p)) == q("2/3"));
  CHECK(evaluate_operator(F, {a}, {GaussRat(1)}, std::span<const GaussRat>(p)) == va);
  CHECK_THROWS_AS(evaluate_operator(F, {a, b}, {half, q("1/3")}, std::span<const GaussRat>(p)),
                  std::invalid_argument);
}

TEST_CASE("witness determinant matches Laplace expansion of the full minor") {
  std::mt19937_64 rng(23);
  int nonzero = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const std::size_t k = 1 + trial % 3;
    Sys F;
    for (std::size_t i = 0; i < n; ++i) F.push_back(testsupport::random_poly(rng, n, 1, 3));
    auto basis = JetBasis::make(n, k);
    auto jets = jet_at(F, std::span<const GaussRat>(origin(n)), basis);
    for (const auto& B : enumerate_staircases(n, k)) {
      auto T = build_T(jets, B);
      auto w = witness_minor(T);
      if (!w.nonzero()) continue;
      ++nonzero;
      std::vector<std::size_t> cols;
      for (const auto& l : w.selected) cols.push_back(T.column(l));
      std::sort(cols.begin(), cols.end());
      CHECK(laplace(T.entries.select_columns(cols)) == w.det);
    }
  }
  CHECK(nonzero > 20);
}

TEST_CASE("homogeneity and translation") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const std::size_t k = 1 + trial % 3;
    Sys F;
    for (std::size_t i = 0; i < n; ++i) F.push_back(testsupport::random_poly(rng, n, 0, 3, true));
    std::vector<GaussRat> p(n);
    for (auto& c : p) c = testsupport::small_gaussian(rng);
    auto r = mult_exceeds(F, std::span<const GaussRat>(p), k);
    if (r.exceeds) continue;
    const auto& w = *r.witness;
    GaussRat lambda = testsupport::small_gaussian(rng);
    if (lambda.is_zero()) lambda = GaussRat(2);
    Sys scaled = F;
    for (auto& f : scaled) f *= lambda;
    GaussRat power(1);
    for (std::size_t e = 0; e < w.homogeneity; ++e) power *= lambda;
    CHECK(evaluate_operator(scaled, w.B, w.selected, std::span<const GaussRat>(p)) == power * w.det);

    Sys shifted;
    for (const auto& f : F) shifted.push_back(f.taylor_shift(std::span<const GaussRat>(p)));
    CHECK(evaluate_operator(shifted, w.B, w.selected, std::span<const GaussRat>(origin(n))) == w.det);

    auto sym = operator_polynomial(F, w.B, w.selected);
    CHECK(sym.evaluate(std::span<const GaussRat>(p)) == w.det);
  }
}

TEST_CASE("operator polynomials") {
  Sys id{poly(2, {{{1, 0}, "1"}}), poly(2, {{{0, 1}, "1"}})};
  auto r = mult_exceeds(id, std::span<const GaussRat>(origin(2)), 1);
  auto P = operator_polynomial(id, r.witness->B, r.witness->selected);
  CHECK(P == ExactPoly::constant(2, GaussRat(1)));

  Sys eps{poly(1, {{{2}, "1"}, {{0}, "-1/4"}})};
  auto B = stair1({0});
  std::vector<ColumnLabel> sel{ColumnLabel::basis(MultiIndex{0}), ColumnLabel::monomial(0, MultiIndex{1})};
  auto M = operator_polynomial(eps, B, sel);
  CHECK(M.evaluate(std::span<const GaussRat>(origin(1))) == q("-1/4"));
  CHECK(M == poly(1, {{{2}, "1"}, {{0}, "-1/4"}}));

  auto eta = eta_example("1/2");
  auto r2 = mult_exceeds(eta, std::span<const GaussRat>(origin(1)), 2);
  auto M2 = operator_polynomial(eta, r2.witness->B, r2.witness->selected);
  CHECK(M2.degree() == 0);
  CHECK(M2 == ExactPoly::constant(1, r2.witness->det));
}

TEST_CASE("float mode agrees with exact mode") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const std::size_t k = 1 + trial % 3;
    Sys F;
    for (std::size_t i = 0; i < n; ++i) F.push_back(testsupport::random_poly(rng, n, 1, 3));
    PolySystem<Complex> Ff;
    for (const auto& f : F) Ff.push_back(to_float(f));
    std::vector<Complex> pf(n);
    auto re = mult_exceeds(F, std::span<const GaussRat>(origin(n)), k);
    auto rf = mult_exceeds(Ff, std::span<const Complex>(pf), k);
    CHECK(re.exceeds == rf.exceeds);
    if (re.exceeds) continue;
    REQUIRE(rf.witness->condition.has_value());
    const Complex exact_value =
        evaluate_operator(F, rf.witness->B, rf.witness->selected, std::span<const GaussRat>(origin(n))).to_complex();
    CHECK(std::abs(exact_value - rf.witness->det) <= 1e-9 * std::max(1.0, std::abs(exact_value)));
  }
}

TEST_CASE("mult_exceeds agrees with the jet quotient oracle") {
  std::mt19937_64 rng(2718);
  int exceeded = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const std::size_t k = 1 + (trial / 2) % 4;
    const auto F = testsupport::random_exact_map(rng, n, k, static_cast<unsigned>(trial % 3));
    const bool oracle = jet_quotient_dim(IdealGens(F), k) > k;
    INFO("trial " << trial << " n=" << n << " k=" << k);
    CHECK(mult_exceeds(F, std::span<const GaussRat>(origin(n)), k).exceeds == oracle);
    exceeded += oracle;
  }
  // Both outcomes occur.
  CHECK(exceeded > 20);
  CHECK(exceeded < 180);
}
