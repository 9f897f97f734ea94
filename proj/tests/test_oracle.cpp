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

ExactPoly x2(unsigned a, unsigned b, const std::string& c = "1") { return poly(2, {{{a, b}, c}}); }

// Integral closure of (x^a, y^b) is spanned by monomials with i/a + j/b >= 1.
bool in_closure_of_monomial_pair(const ExactPoly& g, unsigned a, unsigned b) {
  for (const auto& [m, c] : g.terms()) {
    if (m[0] * b + m[1] * a < a * b) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("jet quotient dimensions") {
  CHECK(jet_quotient_dim(IdealGens({x2(2, 0), x2(0, 2)}), 3) == 4);
  for (std::size_t k = 0; k <= 5; ++k) {
    CHECK(jet_quotient_dim(IdealGens({x2(1, 0), x2(0, 1)}), k) == 1);
    CHECK(jet_quotient_dim(IdealGens({ExactPoly(2), ExactPoly(2)}), k) == jet_dim(2, k));
  }
}

TEST_CASE("multiplicity oracle") {
  auto r = multiplicity(IdealGens({x2(2, 0), x2(0, 2)}));
  REQUIRE(r.result);
  CHECK(*r.result == 4);
  CHECK(r.k_used == 4);

  auto id = multiplicity(IdealGens({x2(1, 0), x2(0, 1)}));
  CHECK(*id.result == 1);
  CHECK(id.k_used == 1);

  auto cusps = multiplicity(IdealGens({x2(2, 0) - x2(0, 3), x2(0, 2) - x2(3, 0)}));
  CHECK(*cusps.result == 4);

  for (unsigned a = 1; a <= 4; ++a) {
    for (unsigned b = 1; b <= 4; ++b) {
      auto m = multiplicity(IdealGens({x2(a, 0), x2(0, b)}));
      REQUIRE(m.result);
      CHECK(*m.result == a * b);
    }
  }
  // Non-isolated zero: the cap is reached.
  CHECK_FALSE(multiplicity(IdealGens({x2(1, 0), x2(1, 0)}), 6).result);
}

TEST_CASE("Hilbert-Samuel multiplicity by generic reduction") {
  CHECK(hs_multiplicity(IdealGens({x2(1, 0), x2(0, 1)})).value == 1);
  CHECK(hs_multiplicity(IdealGens({x2(2, 0), x2(1, 1), x2(0, 2)})).value == 4);
  CHECK(hs_multiplicity(IdealGens({x2(2, 0), x2(0, 2)})).value == 4);
  CHECK(hs_multiplicity(IdealGens({x2(3, 0), x2(1, 1), x2(0, 3)}), 3, 11).value == 6);
  CHECK_THROWS_AS(hs_multiplicity(IdealGens({x2(1, 0), x2(2, 0)}), 2, 1, 6), std::domain_error);
  auto rep = hs_multiplicity(IdealGens({x2(2, 0), x2(0, 2)}), 4, 3);
  CHECK(rep.per_trial.size() == 4);
  CHECK(rep.seed == 3);
}

TEST_CASE("curve orders") {
  CurveParam g{{poly(1, {{{1}, "1"}}), poly(1, {{{3}, "1"}})}, 1};
  CHECK(*curve_order(x2(2, 1), g) == 5);
  CurveParam ram{{poly(1, {{{2}, "1"}})}, 2};
  CHECK(*curve_order(poly(1, {{{1}, "1"}}), ram) == 1);
  CurveParam par{{poly(1, {{{1}, "1"}}), poly(1, {{{2}, "1"}})}, 1};
  CHECK_FALSE(curve_order(x2(2, 0) - x2(0, 1), par).has_value());
  CurveParam cusp{{poly(1, {{{2}, "1"}}), poly(1, {{{3}, "1"}})}, 3};
  CHECK(*curve_order(x2(1, 0), cusp) == mpq_class(2, 3));
}

TEST_CASE("curve-mult: high order along a curve forces high multiplicity") {
  // If every f_i vanishes to order >= k along a smooth curve germ through
  // the origin, mult F >= k.
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const unsigned k = 1 + trial % 3;
    // Curve (s, c s^2 + d s^3); f_i = (y - c x^2 - d x^3) h_i + x^k g_i.
    const auto c = testsupport::small_rational(rng);
    const auto d = testsupport::small_rational(rng);
    ExactPoly curve_eq = x2(0, 1) - x2(2, 0) * c - x2(3, 0) * d;
    PolySystem<GaussRat> F;
    for (int i = 0; i < 2; ++i) {
      auto h = testsupport::random_poly(rng, 2, 0, 2);
      auto gpart = testsupport::random_poly(rng, 2, 0, 1);
      F.push_back(curve_eq * h + x2(k, 0) * gpart);
    }
    CurveParam gamma{{poly(1, {{{1}, "1"}}), poly(1, {}) + ExactPoly::monomial(MultiIndex{2}, c) +
                                                 ExactPoly::monomial(MultiIndex{3}, d)},
                     1};
    bool all_high = true;
    for (const auto& f : F) {
      auto o = curve_order(f, gamma);
      all_high = all_high && (!o || *o >= k);
    }
    REQUIRE(all_high);
    auto m = multiplicity(IdealGens(F), 12);
    if (!m.result) continue;  // non-isolated: multiplicity infinite, trivially >= k
    ++checked;
    CHECK(*m.result >= k);
  }
  CHECK(checked > 20);
}

TEST_CASE("curve growth of basic operators") {
  std::mt19937_64 rng(1729);
  int finite_bounds = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = testsupport::curve_instance(rng, trial);
    std::vector<std::optional<mpq_class>> ord_f;
    for (const auto& f : inst.F) ord_f.push_back(curve_order(f, inst.gamma));
    for (const auto& op : testsupport::curve_operator_specs(rng, inst.F, inst.k)) {
      const auto ord_M = curve_order(operator_polynomial(inst.F, op.B, op.selected), inst.gamma);
      INFO("trial " << trial << " k=" << inst.k);
      CHECK(testsupport::curve_growth_holds(ord_M, ord_f, inst.k));
      // Count cases where the bound says something.
      std::optional<mpq_class> lo;
      for (const auto& o : ord_f) {
        if (o && (!lo || *o < *lo)) lo = *o;
      }
      if (lo && *lo > static_cast<long>(inst.k)) ++finite_bounds;
    }
  }
  CHECK(finite_bounds > 20);
}

TEST_CASE("operator ideal generators") {
  SECTION("unit operator for (x^2, y) at k = 2") {
    auto M = mop_ideal_generators(IdealGens({x2(2, 0), x2(0, 1)}), 2, {true, 0, 12, 7});
    bool unit = false;
    for (std::size_t i = M.original_count; i < M.ideal.generators.size(); ++i) {
      unit = unit || !M.ideal.generators[i].coeff(MultiIndex{0, 0}).is_zero();
    }
    CHECK(unit);
    CHECK(*multiplicity(M.ideal).result == 0);
  }
  SECTION("identity map adjoins a constant") {
    auto M = mop_ideal_generators(IdealGens({x2(1, 0), x2(0, 1)}), 1, {true, 0, 12, 7});
    CHECK(std::find(M.ideal.generators.begin(), M.ideal.generators.end(),
                    ExactPoly::constant(2, GaussRat(1))) != M.ideal.generators.end());
  }
  SECTION("m^k M lies in the integral closure for monomial pairs") {
    for (auto [a, b] : {std::pair{2u, 2u}, std::pair{3u, 3u}, std::pair{2u, 3u}}) {
      for (std::size_t k : {1, 2}) {
        IdealGens I({x2(a, 0), x2(0, b)});
        auto M = mop_ideal_generators(I, k, {true, 1, 12, 5});
        CHECK(M.tuples_sampled == 2);
        for (std::size_t i = M.original_count; i < M.ideal.generators.size(); ++i) {
          for (const auto& mono : monomials_of_degree(2, k)) {
            CHECK(in_closure_of_monomial_pair(M.ideal.generators[i].shifted(mono), a, b));
          }
        }
      }
    }
  }
  SECTION("order-1 operators of (x^2, y^2) need not lie in the ideal") {
    PolySystem<GaussRat> F{x2(2, 0), x2(0, 2)};
    Staircase B(2, {MultiIndex{0, 0}});
    std::vector<ColumnLabel> sel{ColumnLabel::basis(MultiIndex{0, 0}), ColumnLabel::monomial(0, MultiIndex{0, 0}),
                                 ColumnLabel::monomial(1, MultiIndex{0, 0})};
    auto g = operator_polynomial(F, B, sel);
    CHECK(g == x2(1, 1, "4"));
    CHECK(*multiplicity(IdealGens({x2(2, 0), x2(0, 2), g})).result == 3);
    for (const auto& mono : monomials_of_degree(2, 1)) CHECK(in_closure_of_monomial_pair(g.shifted(mono), 2, 2));
  }
}

TEST_CASE("multiplicity of the operator ideal") {
  // mult^{1/2} M >= mult^{1/2} I - k
  for (auto [a, b] : {std::pair{2u, 2u}, std::pair{3u, 3u}, std::pair{2u, 3u}}) {
    IdealGens I({x2(a, 0), x2(0, b)});
    const double lhs_i = std::sqrt(static_cast<double>(hs_multiplicity(I).value));
    for (std::size_t k : {1, 2}) {
      auto M = mop_ideal_generators(I, k);
      const double lhs = std::sqrt(static_cast<double>(hs_multiplicity(M.ideal).value));
      CHECK(lhs >= lhs_i - static_cast<double>(k));
    }
  }
}
