#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mop/geometry.hpp"
#include "suites.hpp"
#include "support.hpp"

using namespace mop;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

FloatPoly cpoly(const std::vector<std::pair<unsigned, Complex>>& terms) {
  FloatPoly p(1);
  for (const auto& [e, c] : terms) p.add_term(MultiIndex{e}, c);
  return p;
}

FloatPoly from_roots(const std::vector<Complex>& roots) {
  FloatPoly p = FloatPoly::constant(1, Complex(1.0));
  for (const auto& r : roots) p = p * cpoly({{1, 1.0}, {0, -r}});
  return p;
}

mpq_class two_pow(int e) {
  mpq_class v(1);
  for (int i = 0; i < std::abs(e); ++i) v *= 2;
  return e >= 0 ? v : mpq_class(1 / v);
}

}  // namespace

TEST_CASE("argument principle counts on small examples", "[geometry][count]") {
  const FloatPoly f = cpoly({{3, 1.0}, {1, -0.25}});
  CHECK(count_zeros_disc(f, 0.0, 1.0) == 3);
  CHECK(count_zeros_disc(f, 0.0, 0.3) == 1);
  CHECK(count_zeros_disc(cpoly({{2, 1.0}, {0, 1.0}}), 0.0, 0.5) == 0);
  CHECK(count_zeros_disc(f, Complex(0.5, 0.0), 0.1) == 1);

  // Callable form with a transcendental function: exp(z) - 1 has zeros 2 pi i m.
  auto g = [](Complex z) { return std::exp(z) - 1.0; };
  auto dg = [](Complex z) { return std::exp(z); };
  CHECK(count_zeros_disc(g, dg, 0.0, 7.0) == 3);
  CHECK(count_zeros_disc(g, dg, 0.0, 1.0) == 1);
}

TEST_CASE("argument principle rejects zeros on the circle", "[geometry][count]") {
  CHECK_THROWS_AS(count_zeros_disc(cpoly({{1, 1.0}, {0, -1.0}}), 0.0, 1.0), NearBoundaryZero);
  CHECK_THROWS_AS(count_zeros_disc(cpoly({{2, 1.0}, {0, 0.25}}), 0.0, 0.5), NearBoundaryZero);
  CHECK_THROWS(count_zeros_disc(cpoly({{1, 1.0}}), 0.0, 0.0));
}

TEST_CASE("argument principle matches factored polynomials", "[geometry][count][property]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_int_distribution<int> deg(1, 7);
  std::uniform_real_distribution<double> rad(0.3, 1.4);
  int checked = 0;
  while (checked < 100) {
    std::vector<Complex> roots(static_cast<std::size_t>(deg(rng)));
    for (auto& r : roots) r = Complex(u(rng), u(rng));
    // A repeated root now and then.
    if (roots.size() >= 2 && checked % 5 == 0) roots[1] = roots[0];
    const double radius = rad(rng);
    bool clear = true;
    int inside = 0;
    for (const auto& r : roots) {
      if (std::abs(std::abs(r) - radius) < 1e-3) clear = false;
      if (std::abs(r) < radius) ++inside;
    }
    if (!clear) continue;
    CHECK(count_zeros_disc(from_roots(roots), 0.0, radius) == inside);
    ++checked;
  }
}

TEST_CASE("polydisc bound on x^2 - eps^2", "[geometry][polydisc]") {
  std::vector<mpq_class> params;
  for (int j = 1; j <= 10; ++j) params.push_back(two_pow(-j));
  const auto table = polydisc_zero_bound_check(family_x2_minus_eps2(), params, 1);
  REQUIRE(table.rows.size() == 10);
  for (std::size_t j = 0; j < table.rows.size(); ++j) {
    const auto& row = table.rows[j];
    const mpq_class eps = params[j];
    REQUIRE_FALSE(row.skipped);
    REQUIRE(row.s_exact);
    REQUIRE(row.r_exact);
    REQUIRE(row.ratio_exact);
    CHECK(*row.s_exact == eps * eps);
    CHECK(*row.r_exact == eps);
    CHECK(*row.ratio_exact == eps);
    if (j > 0) CHECK(row.ratio < table.rows[j - 1].ratio);
  }
  CHECK(table.max_ratio == 0.5);
  CHECK(table.C_Z_est == 2.0);
  CHECK(fit_polydisc_constant(table).value == 2.0);
}

TEST_CASE("polydisc bound on the diagonal family has the same profile", "[geometry][polydisc]") {
  std::vector<mpq_class> params;
  for (int j = 1; j <= 6; ++j) params.push_back(two_pow(-j));
  const auto t1 = polydisc_zero_bound_check(family_x2_minus_eps2(), params, 1);
  const auto t2 = polydisc_zero_bound_check(family_x2_minus_eps2_diag(), params, 1);
  for (std::size_t j = 0; j < params.size(); ++j) {
    REQUIRE(t2.rows[j].ratio_exact);
    CHECK(*t2.rows[j].ratio_exact == *t1.rows[j].ratio_exact);
  }
  CHECK(t2.max_ratio == t1.max_ratio);
}

TEST_CASE("polydisc bound skips eps = 0 and validates the zero list", "[geometry][polydisc]") {
  const auto table = polydisc_zero_bound_check(family_x2_minus_eps2(), {mpq_class(0), mpq_class(1, 3)}, 1);
  CHECK(table.rows[0].skipped);
  CHECK_FALSE(table.rows[1].skipped);
  CHECK(table.max_ratio == table.rows[1].ratio);

  auto short_list = family_x2_minus_eps2();
  short_list.zeros = [](const mpq_class& e) { return std::vector<std::vector<GaussRat>>{{GaussRat(e)}}; };
  CHECK_THROWS_AS(polydisc_zero_bound_check(short_list, {mpq_class(1, 2)}, 1), std::invalid_argument);

  auto wrong = family_x2_minus_eps2();
  wrong.zeros = [](const mpq_class& e) {
    return std::vector<std::vector<GaussRat>>{{GaussRat(e)}, {GaussRat(mpq_class(2 * e))}};
  };
  CHECK_THROWS_AS(polydisc_zero_bound_check(wrong, {mpq_class(1, 2)}, 1), std::invalid_argument);
}

TEST_CASE("polydisc ratio stays bounded on a random cubic family", "[geometry][polydisc][property]") {
  // f = (x - a e)(x - b e)(x - c e) with fixed Gaussian a, b, c: k = 2.
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<GaussRat> shape;
    for (int i = 0; i < 3; ++i) shape.push_back(testsupport::small_gaussian(rng) + GaussRat(mpq_class(1, 7)));
    ZeroFamily fam;
    fam.name = "cubic";
    fam.n = 1;
    fam.zeros = [shape](const mpq_class& e) {
      std::vector<std::vector<GaussRat>> z;
      for (const auto& c : shape) z.push_back({c * GaussRat(e)});
      return z;
    };
    fam.map = [fam](const mpq_class& e) {
      ExactPoly f = ExactPoly::constant(1, GaussRat(1));
      for (const auto& z : fam.zeros(e)) {
        ExactPoly lin(1);
        lin.add_term(MultiIndex{1}, GaussRat(1));
        lin.add_term(MultiIndex{0}, -z[0]);
        f = f * lin;
      }
      return PolySystem<GaussRat>{f};
    };
    std::vector<mpq_class> params;
    for (int j = 0; j <= 12; ++j) params.push_back(two_pow(-j));
    const auto table = polydisc_zero_bound_check(fam, params, 2);
    // Pivoting picks the largest of the x^0, x^1, x^2 coefficients, so s = max_j |sigma_j| e^j
    // and r = e max |a|: s / r is non-decreasing in e and peaks at e = 1.
    CHECK(std::isfinite(table.C_Z_est));
    CHECK(table.C_Z_est > 0.0);
    CHECK(table.max_ratio == table.rows.front().ratio);
  }
}

TEST_CASE("growth search examples", "[geometry][growth]") {
  SECTION("F = x, one derivative needed") {
    const PolySystem<Complex> F{cpoly({{1, 1.0}})};
    const auto rep = growth_search(F, 1, 1.0, 0.5);
    CHECK_THAT(rep.ratio, WithinAbs(1.0, 1e-12));
    CHECK(rep.sample_count == 1000);
  }
  SECTION("F = x + x^2") {
    const PolySystem<Complex> F{cpoly({{1, 1.0}, {2, 1.0}})};
    const auto rep = growth_search(F, 1, 1.0, 0.1);
    CHECK(rep.r_tilde > 0.025);
    CHECK(rep.r_tilde < 0.1);
    // |z||1 + z| / r on |z| = r lies in [1 - r, 1 + r].
    CHECK(rep.ratio >= 1.0 - rep.r_tilde - 1e-12);
    CHECK(rep.ratio <= 1.0 + rep.r_tilde);
    CHECK(rep.ratio >= 0.9);
    CHECK(rep.r_below_s);
  }
  SECTION("F = x^2 - eps^2 avoids the zeros") {
    const double eps = 1e-2;
    const PolySystem<Complex> F{cpoly({{2, 1.0}, {0, -eps * eps}})};
    const auto rep = growth_search(F, 2, 1.0, 2 * eps);
    CHECK(rep.ratio > 0.0);
    CHECK(std::abs(rep.r_tilde - eps) > 1e-6);
    // min |z^2 - e^2| on |z| = t is |t^2 - e^2|.
    CHECK(rep.min_sphere_norm >= std::abs(rep.r_tilde * rep.r_tilde - eps * eps) - 1e-15);
    CHECK(rep.candidates.size() == 16);
  }
  SECTION("all candidates zero") {
    const PolySystem<Complex> F{FloatPoly(1)};
    CHECK_THROWS_AS(growth_search(F, 1, 1.0, 0.5), std::runtime_error);
    CHECK_THROWS_AS(growth_search(F, 1, 0.0, 0.5), std::invalid_argument);
  }
}

TEST_CASE("growth ratio is positive on random maps", "[geometry][growth][property]") {
  std::mt19937_64 rng(4242);
  std::vector<GrowthReport> reports;
  for (std::size_t n = 1; n <= 2; ++n) {
    for (std::size_t k = 1; k <= 2; ++k) {
      for (int trial = 0; trial < 4; ++trial) {
        const auto inst = testsupport::division_instance(rng, n, k, 0.05);
        const double s = inst.witness.magnitude();
        const auto rep = growth_search(testsupport::to_float_system(inst.F), k, s, s / 2, 200 * n, 11);
        CHECK(rep.ratio > 0.0);
        CHECK(rep.r_tilde > rep.r / 4);
        CHECK(rep.r_tilde < rep.r);
        reports.push_back(rep);
      }
    }
  }
  const auto consts = fit_growth_constants(reports, "random");
  UniversalConstants uc;
  for (const auto& c : consts) uc.add(c);
  REQUIRE(uc.find("A", "random"));
  CHECK(uc.find("A", "random")->value > 0.25);
  CHECK(uc.find("B", "random")->value > 0.0);
}

TEST_CASE("perturbation radius examples", "[geometry][perturb]") {
  SECTION("F = x^2, G = 1e-4") {
    const PolySystem<Complex> F{cpoly({{2, 1.0}})};
    const PolySystem<Complex> G{cpoly({{0, 1e-4}})};
    const auto rep = perturbation_radius(F, G, 2, 1.0, 1e-4);
    REQUIRE(rep.found);
    CHECK(rep.r_tilde > 1e-2);
    CHECK(rep.r_tilde * rep.r_tilde > 1e-4);
    REQUIRE(rep.count_F);
    REQUIRE(rep.count_FG);
    CHECK(*rep.count_F == 2);
    CHECK(*rep.count_FG == 2);
    // A constant of size eps fails the k-jet condition eps <= eps^3.
    CHECK_FALSE(rep.hypothesis_holds);
    // ||G(0)|| < eps needs eps strictly above the constant.
    const auto pw = perturbation_radius(F, G, 2, 1.0, 2e-4, PerturbationMode::Power);
    CHECK(pw.hypothesis_holds);
    REQUIRE(pw.found);
    CHECK(pw.r_tilde < rep.r_tilde);
    CHECK(pw.counts_equal());
  }
  SECTION("G = 0 accepts the first grid radius") {
    const PolySystem<Complex> F{cpoly({{1, 1.0}, {2, 1.0}})};
    const PolySystem<Complex> G{FloatPoly(1)};
    const auto rep = perturbation_radius(F, G, 1, 1.0, 1e-3, PerturbationMode::Direct, 0, 7, 64);
    REQUIRE(rep.found);
    CHECK_THAT(rep.r_tilde, WithinRel(1e-3 * std::pow(1e3, 0.5 / 64), 1e-12));
    CHECK(rep.counts_equal());
    CHECK(rep.hypothesis_holds);
  }
  SECTION("F = x + x^2, G = eps") {
    const double eps = 1e-3;
    const PolySystem<Complex> F{cpoly({{1, 1.0}, {2, 1.0}})};
    const PolySystem<Complex> G{cpoly({{0, eps}})};
    const auto rep = perturbation_radius(F, G, 1, 1.0, eps);
    REQUIRE(rep.found);
    CHECK(rep.r_tilde * (1 - rep.r_tilde) > eps);
    REQUIRE(rep.count_F);
    CHECK(*rep.count_F == 1);
    CHECK(*rep.count_FG == 1);
  }
  SECTION("no admissible radius is reported, not thrown") {
    const PolySystem<Complex> F{cpoly({{2, 1.0}})};
    const PolySystem<Complex> G{cpoly({{0, 2.0}})};
    const auto rep = perturbation_radius(F, G, 1, 1.0, 0.5);
    CHECK_FALSE(rep.found);
    CHECK_FALSE(rep.failure.empty());
  }
  SECTION("n = 2 uses known zeros") {
    PolySystem<Complex> F{FloatPoly(2), FloatPoly(2)};
    F[0].add_term(MultiIndex{1, 0}, 1.0);
    F[1].add_term(MultiIndex{0, 1}, 1.0);
    PolySystem<Complex> G{FloatPoly::constant(2, 1e-3), FloatPoly(2)};
    const KnownZeros kz{{{0.0, 0.0}}, {{-1e-3, 0.0}}};
    const auto rep = perturbation_radius(F, G, 0, 1.0, 1e-3, PerturbationMode::Direct, 500, 3, 64, kz);
    REQUIRE(rep.found);
    CHECK(rep.counts_equal());
  }
}

TEST_CASE("perturbation counts agree whenever a radius is found", "[geometry][perturb][property]") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int found = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = 1 + static_cast<std::size_t>(trial % 3);
    // F = x^{k} (1 + c x), G random of size about eps.
    FloatPoly f(1);
    f.add_term(MultiIndex{static_cast<unsigned>(k)}, 1.0);
    f.add_term(MultiIndex{static_cast<unsigned>(k + 1)}, Complex(u(rng), u(rng)) * 0.5);
    const double eps = std::pow(10.0, -2.0 - 2.0 * std::abs(u(rng)));
    FloatPoly g(1);
    for (unsigned e = 0; e <= 2; ++e) g.add_term(MultiIndex{e}, Complex(u(rng), u(rng)) * eps);
    const auto rep = perturbation_radius({f}, {g}, k, 1.0, eps, trial % 2 ? PerturbationMode::Power
                                                                          : PerturbationMode::Direct, 400, trial);
    if (!rep.found) continue;
    ++found;
    REQUIRE(rep.count_F);
    REQUIRE(rep.count_FG);
    CHECK(*rep.count_F == *rep.count_FG);
  }
  CHECK(found > 30);
}

TEST_CASE("univariate lower bound ratio", "[geometry][poly]") {
  for (unsigned d = 1; d <= 5; ++d) {
    const auto rep = poly_lower_bound_ratio(cpoly({{d, 1.0}}), 512);
    CHECK(rep.degree == d);
    CHECK_THAT(rep.min_ratio, WithinAbs(1.0, 1e-12));
  }
  const FloatPoly P = cpoly({{2, 0.5}, {0, -0.5}});
  const auto roots = polynomial_roots(P);
  REQUIRE(roots.size() == 2);
  CHECK_THAT(poly_ratio_at(P, roots, 0.0), WithinAbs(0.5, 1e-14));
  CHECK(poly_lower_bound_ratio(P).min_ratio > 0.0);

  CHECK_THROWS_AS(poly_lower_bound_ratio(cpoly({{2, 1.0}, {0, -1.0}})), std::invalid_argument);
}

TEST_CASE("companion roots reproduce the factorisation", "[geometry][poly][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Complex> roots(1 + static_cast<std::size_t>(trial % 6));
    for (auto& r : roots) r = Complex(u(rng), u(rng));
    if (trial % 4 == 0) roots.push_back(0.0);
    const auto got = polynomial_roots(from_roots(roots));
    REQUIRE(got.size() == roots.size());
    for (const auto& r : roots) {
      double best = 1e300;
      for (const auto& g : got) best = std::min(best, std::abs(g - r));
      CHECK(best < 1e-6);
    }
  }
}

TEST_CASE("random degree-4 lower bounds are positive", "[geometry][poly][property]") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<PolyBoundReport> reports;
  for (int trial = 0; trial < 20; ++trial) {
    FloatPoly P(1);
    for (unsigned e = 0; e <= 4; ++e) P.add_term(MultiIndex{e}, Complex(u(rng), u(rng)));
    P *= Complex(1.0 / P.norm_l1());
    const auto rep = poly_lower_bound_ratio(P, 2048, 9);
    CHECK(rep.min_ratio > 0.0);
    CHECK(rep.degree == 4);
    reports.push_back(rep);
  }
  const auto c = fit_poly_constant(reports, "random-4");
  CHECK(c.name == "C_4");
  CHECK(c.value > 0.0);
  CHECK(c.sample_size == 20 * 2048);
}

TEST_CASE("constant registry rejects non-positive values", "[geometry][constants]") {
  UniversalConstants uc;
  CHECK_THROWS_AS(uc.add({"B", 0.0, "f", 1, 0}), std::invalid_argument);
  uc.add({"B", 0.5, "f", 1, 0});
  uc.add({"B", 0.25, "f", 2, 0});
  REQUIRE(uc.estimates.size() == 1);
  CHECK(uc.find("B", "f")->value == 0.25);
  CHECK(uc.find("B", "g") == nullptr);
}
