#include "mop/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>

#include "mop/random.hpp"

namespace mop {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Trapezoid estimate of (1/2 pi i) \oint f'/f on M nodes; also tracks the
// boundary minimum of |f| and maximum of |f'|.
struct TrapezoidPass {
  Complex value;
  double min_f = std::numeric_limits<double>::infinity();
  double max_df = 0.0;
};

TrapezoidPass trapezoid(const AnalyticFn& f, const AnalyticFn& df, Complex center, double radius, std::size_t M) {
  TrapezoidPass pass;
  Complex sum(0.0, 0.0);
  for (std::size_t j = 0; j < M; ++j) {
    const Complex w = std::polar(radius, kTwoPi * static_cast<double>(j) / static_cast<double>(M));
    const Complex fz = f(center + w);
    const Complex dfz = df(center + w);
    pass.min_f = std::min(pass.min_f, std::abs(fz));
    pass.max_df = std::max(pass.max_df, std::abs(dfz));
    // dz = i w dtheta, so f'/f dz / (2 pi i) = f' w / f dtheta / (2 pi).
    if (std::abs(fz) > 0.0) sum += dfz * w / fz;
  }
  pass.value = sum / static_cast<double>(M);
  return pass;
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double out = 0.0;
  while (i > 0) {
    out += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return out;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// Cranley-Patterson shift per coordinate, drawn from the seed.
std::vector<double> halton_shift(std::size_t dims, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> shift(dims);
  for (auto& s : shift) s = u(rng);
  return shift;
}

double halton(std::uint64_t i, std::size_t dim, const std::vector<double>& shift) {
  const double v = radical_inverse(i, kPrimes[dim]) + shift[dim];
  return v - std::floor(v);
}

std::vector<Complex> scaled(const std::vector<Complex>& u, double r) {
  std::vector<Complex> z(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) z[i] = u[i] * r;
  return z;
}

// Componentwise G_i^{k+1}.
PolySystem<Complex> componentwise_power(const PolySystem<Complex>& G, std::size_t e) {
  PolySystem<Complex> out;
  for (const auto& g : G) {
    FloatPoly p = FloatPoly::constant(g.n(), Complex(1.0));
    for (std::size_t j = 0; j < e; ++j) p = p * g;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  // Half-step offsets keep the grid off both endpoints.
  std::vector<double> out(count);
  const double ratio = hi / lo;
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = lo * std::pow(ratio, (static_cast<double>(j) + 0.5) / static_cast<double>(count));
  }
  return out;
}

std::optional<mpq_class> exact_modulus(const GaussRat& z) {
  if (z.is_real()) return abs(z.re());
  if (sgn(z.re()) == 0) return abs(z.im());
  return std::nullopt;
}

}  // namespace

ZeroCount count_zeros_disc_report(const AnalyticFn& f, const AnalyticFn& df, Complex center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disc radius must be positive");
  constexpr std::size_t kStart = 64;
  constexpr std::size_t kCap = std::size_t{1} << 20;
  auto check_boundary = [&](const TrapezoidPass& p) {
    if (p.min_f <= 1e-9 * radius * p.max_df || p.min_f == 0.0) {
      throw NearBoundaryZero("zero of f within tolerance of the circle");
    }
  };
  TrapezoidPass prev = trapezoid(f, df, center, radius, kStart);
  check_boundary(prev);
  std::size_t M = kStart;
  while (true) {
    M *= 2;
    if (M > kCap) throw std::runtime_error("argument principle integral did not converge");
    TrapezoidPass cur = trapezoid(f, df, center, radius, M);
    check_boundary(cur);
    const bool done = std::abs(cur.value - prev.value) < 1e-8;
    prev = cur;
    if (done) break;
  }
  const double raw = prev.value.real();
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 0.1) throw std::runtime_error("winding number is not near an integer");
  ZeroCount out;
  out.count = static_cast<int>(rounded);
  out.raw = raw;
  out.nodes = M;
  out.min_abs = prev.min_f;
  return out;
}

int count_zeros_disc(const AnalyticFn& f, const AnalyticFn& df, Complex center, double radius) {
  return count_zeros_disc_report(f, df, center, radius).count;
}

int count_zeros_disc(const FloatPoly& f, Complex center, double radius) {
  if (f.n() != 1) throw std::invalid_argument("zero counting needs a univariate polynomial");
  if (f.is_zero()) throw std::invalid_argument("zero polynomial has no zero count");
  const FloatPoly df = f.derivative(0);
  auto ev = [](const FloatPoly& p) {
    return [&p](Complex z) { return p.evaluate(std::span<const Complex>(&z, 1)); };
  };
  return count_zeros_disc(ev(f), ev(df), center, radius);
}

std::vector<std::vector<Complex>> sphere_directions(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n == 0 || 2 * n > std::size(kPrimes)) throw std::invalid_argument("sphere dimension out of range");
  std::vector<std::vector<Complex>> out;
  out.reserve(count);
  const auto shift = halton_shift(2 * n, seed);
  if (n == 1) {
    for (std::size_t j = 0; j < count; ++j) {
      const double theta = kTwoPi * (static_cast<double>(j) + shift[0]) / static_cast<double>(count);
      out.push_back({std::polar(1.0, theta)});
    }
    return out;
  }
  for (std::size_t j = 0; j < count; ++j) {
    // Box-Muller on pairs of Halton coordinates gives Gaussian (re, im).
    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u1 = std::max(halton(j + 1, 2 * i, shift), 1e-300);
      const double u2 = halton(j + 1, 2 * i + 1, shift);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      v[i] = Complex(rad * std::cos(kTwoPi * u2), rad * std::sin(kTwoPi * u2));
    }
    const double norm = euclidean_norm(v);
    if (norm == 0.0) continue;
    for (auto& c : v) c /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

double euclidean_norm(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return std::sqrt(s);
}

std::vector<Complex> evaluate_system(const PolySystem<Complex>& F, const std::vector<Complex>& z) {
  std::vector<Complex> out;
  out.reserve(F.size());
  for (const auto& f : F) out.push_back(f.evaluate(z));
  return out;
}

// ---- polydisc zero bound -------------------------------------------------

ZeroFamily family_x2_minus_eps2() {
  ZeroFamily fam;
  fam.name = "x^2-eps^2";
  fam.n = 1;
  fam.map = [](const mpq_class& e) {
    ExactPoly f(1);
    f.add_term(MultiIndex{2}, GaussRat(1));
    f.add_term(MultiIndex{0}, GaussRat(mpq_class(-e * e)));
    return PolySystem<GaussRat>{f};
  };
  fam.zeros = [](const mpq_class& e) {
    return std::vector<std::vector<GaussRat>>{{GaussRat(e)}, {GaussRat(mpq_class(-e))}};
  };
  return fam;
}

ZeroFamily family_x2_minus_eps2_diag() {
  ZeroFamily fam;
  fam.name = "(x^2-eps^2,y-x)";
  fam.n = 2;
  fam.map = [](const mpq_class& e) {
    ExactPoly f(2);
    f.add_term(MultiIndex{2, 0}, GaussRat(1));
    f.add_term(MultiIndex{0, 0}, GaussRat(mpq_class(-e * e)));
    ExactPoly g(2);
    g.add_term(MultiIndex{0, 1}, GaussRat(1));
    g.add_term(MultiIndex{1, 0}, GaussRat(-1));
    return PolySystem<GaussRat>{f, g};
  };
  fam.zeros = [](const mpq_class& e) {
    const GaussRat p(e);
    const GaussRat m(mpq_class(-e));
    return std::vector<std::vector<GaussRat>>{{p, p}, {m, m}};
  };
  return fam;
}

std::optional<OperatorWitness<GaussRat>> pivoted_exact_witness(const PolySystem<GaussRat>& F, std::size_t k) {
  const std::size_t n = system_dim(F);
  PolySystem<Complex> Ff;
  for (const auto& f : F) Ff.push_back(to_float(f));
  const std::vector<Complex> zf(n, Complex(0.0));
  const auto fres = mult_exceeds<Complex>(Ff, zf, k);
  const std::vector<GaussRat> z(n, GaussRat(0));
  const auto basis = JetBasis::make(n, k);
  const auto jets = jet_at(F, std::span<const GaussRat>(z), basis);
  if (fres.witness) {
    OperatorWitness<GaussRat> w;
    w.B = fres.witness->B;
    w.selected = fres.witness->selected;
    w.rank = fres.witness->rank;
    w.homogeneity = fres.witness->homogeneity;
    w.det = minor_determinant(build_T(jets, w.B), w.selected, GaussRat(1));
    if (!w.det.is_zero()) return w;
  }
  // Float pivoting missed or picked a vanishing minor: use the canonical one.
  const auto eres = mult_exceeds<GaussRat>(F, z, k);
  return eres.witness;
}

PolydiscTable polydisc_zero_bound_check(const ZeroFamily& family, const std::vector<mpq_class>& params,
                                        std::size_t k) {
  PolydiscTable table;
  table.family = family.name;
  table.k = k;
  for (const auto& param : params) {
    const auto F = family.map(param);
    const auto zeros = family.zeros(param);
    if (zeros.size() < k + 1) throw std::invalid_argument("family lists fewer than k+1 zeros");
    // Polydisc radius of each zero, exact where every coordinate is real or imaginary.
    std::vector<std::pair<double, std::optional<mpq_class>>> radii;
    for (const auto& z : zeros) {
      if (z.size() != family.n) throw std::invalid_argument("zero has wrong dimension");
      for (const auto& f : F) {
        if (!f.evaluate(std::span<const GaussRat>(z)).is_zero()) {
          throw std::invalid_argument("family lists a point that is not a zero");
        }
      }
      double rd = 0.0;
      std::optional<mpq_class> rq = mpq_class(0);
      for (const auto& c : z) {
        rd = std::max(rd, std::abs(c.to_complex()));
        const auto m = exact_modulus(c);
        if (m && rq) {
          if (*m > *rq) rq = *m;
        } else {
          rq.reset();
        }
      }
      radii.emplace_back(rd, rq);
    }
    std::stable_sort(radii.begin(), radii.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    PolydiscRow row;
    row.param = param;
    row.r = radii[k].first;
    row.r_exact = radii[k].second;
    const auto w = pivoted_exact_witness(F, k);
    if (w) {
      row.s = w->magnitude();
      if (w->det.is_real()) {
        row.s_exact = abs(w->det.re());
      } else if (sgn(w->det.re()) == 0) {
        row.s_exact = abs(w->det.im());
      }
    }
    if (row.r == 0.0 || row.s == 0.0) {
      row.skipped = true;
    } else {
      row.ratio = row.s / row.r;
      if (row.r_exact && row.s_exact) {
        row.ratio_exact = *row.s_exact / *row.r_exact;
        row.ratio = row.ratio_exact->get_d();
      }
      table.max_ratio = std::max(table.max_ratio, row.ratio);
    }
    table.rows.push_back(std::move(row));
  }
  table.C_Z_est = table.max_ratio > 0.0 ? 1.0 / table.max_ratio : std::numeric_limits<double>::infinity();
  return table;
}

// ---- sphere growth --------------------------------------------------------

GrowthReport growth_search(const PolySystem<Complex>& F, std::size_t k, double s, double r, std::size_t samples,
                           std::uint64_t seed, std::size_t grid) {
  if (!(s > 0.0)) throw std::invalid_argument("growth search needs s > 0");
  if (!(r > 0.0)) throw std::invalid_argument("growth search needs r > 0");
  if (grid == 0) throw std::invalid_argument("growth search needs a nonempty grid");
  const std::size_t n = system_dim(F);
  if (samples == 0) samples = 1000 * n;
  const auto dirs = sphere_directions(n, samples, seed);

  GrowthReport rep;
  rep.r = r;
  rep.s = s;
  rep.k = k;
  rep.seed = seed;
  rep.sample_count = dirs.size();
  rep.r_below_s = r < s;
  double best = -1.0;
  for (double rt : geometric_grid(r / 4.0, r, grid)) {
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& u : dirs) mn = std::min(mn, euclidean_norm(evaluate_system(F, scaled(u, rt))));
    const double ratio = mn / (s * std::pow(rt, static_cast<double>(k)));
    rep.candidates.emplace_back(rt, ratio);
    if (ratio > best) {
      best = ratio;
      rep.r_tilde = rt;
      rep.min_sphere_norm = mn;
      rep.ratio = ratio;
    }
  }
  if (!(rep.ratio > 0.0)) throw std::runtime_error("every candidate sphere scored zero");
  return rep;
}

// ---- perturbations ---------------------------------------------------------

bool jet_condition(const PolySystem<Complex>& G, std::size_t k, double eps) {
  for (const auto& g : G) {
    for (const auto& [m, c] : g.terms()) {
      if (m.degree() > k) continue;
      if (std::abs(c) > std::pow(eps, static_cast<double>(k + 1 - m.degree()))) return false;
    }
  }
  return true;
}

PerturbationReport perturbation_radius(const PolySystem<Complex>& F, const PolySystem<Complex>& G, std::size_t k,
                                       double s, double eps, PerturbationMode mode, std::size_t samples,
                                       std::uint64_t seed, std::size_t grid, const std::optional<KnownZeros>& known) {
  if (!(s > 0.0)) throw std::invalid_argument("perturbation scan needs s > 0");
  if (!(eps > 0.0) || !(eps < s)) throw std::invalid_argument("perturbation scan needs 0 < eps < s");
  if (grid == 0) throw std::invalid_argument("perturbation scan needs a nonempty grid");
  const std::size_t n = system_dim(F);
  if (F.size() != G.size() || system_dim(G) != n) throw std::invalid_argument("F and G must have the same shape");
  if (samples == 0) samples = 1000 * n;

  PerturbationReport rep;
  rep.mode = mode;
  rep.eps = eps;
  rep.s = s;
  rep.seed = seed;
  const std::vector<Complex> origin(n, Complex(0.0));
  if (mode == PerturbationMode::Direct) {
    rep.hypothesis_holds = jet_condition(G, k, eps);
  } else {
    rep.hypothesis_holds = euclidean_norm(evaluate_system(G, origin)) < eps;
  }
  const PolySystem<Complex> H = mode == PerturbationMode::Direct ? G : componentwise_power(G, k + 1);
  PolySystem<Complex> FH = F;
  for (std::size_t i = 0; i < F.size(); ++i) FH[i] += H[i];

  const auto dirs = sphere_directions(n, samples, seed);
  rep.sample_count = dirs.size();
  for (double rt : geometric_grid(eps, s, grid)) {
    double mnF = std::numeric_limits<double>::infinity();
    double mxH = 0.0;
    for (const auto& u : dirs) {
      const auto z = scaled(u, rt);
      mnF = std::min(mnF, euclidean_norm(evaluate_system(F, z)));
      mxH = std::max(mxH, euclidean_norm(evaluate_system(H, z)));
    }
    if (!(mnF > mxH)) continue;
    rep.r_max_admissible = rt;
    if (rep.found) continue;

    std::optional<int> cF;
    std::optional<int> cFH;
    if (n == 1) {
      try {
        cF = count_zeros_disc(F[0], Complex(0.0), rt);
        cFH = count_zeros_disc(FH[0], Complex(0.0), rt);
      } catch (const std::exception& e) {
        // A zero on this circle: try the next admissible radius.
        rep.failure = e.what();
        continue;
      }
    } else if (known) {
      auto inside = [rt](const std::vector<std::vector<Complex>>& zs) {
        return static_cast<int>(std::count_if(zs.begin(), zs.end(),
                                              [rt](const auto& z) { return euclidean_norm(z) < rt; }));
      };
      cF = inside(known->of_F);
      cFH = inside(known->of_FG);
    }
    rep.found = true;
    rep.failure.clear();
    rep.r_tilde = rt;
    rep.min_F = mnF;
    rep.max_G = mxH;
    rep.count_F = cF;
    rep.count_FG = cFH;
  }
  if (!rep.found && rep.failure.empty()) rep.failure = "no admissible radius in the scan range";
  return rep;
}

// ---- univariate lower bound ------------------------------------------------

std::vector<Complex> polynomial_roots(const FloatPoly& P) {
  if (P.n() != 1) throw std::invalid_argument("root finding needs a univariate polynomial");
  if (P.is_zero()) throw std::invalid_argument("zero polynomial has no roots");
  const int d = P.degree();
  std::vector<Complex> c(static_cast<std::size_t>(d) + 1, Complex(0.0));
  for (const auto& [m, v] : P.terms()) c[m[0]] = v;
  std::size_t low = 0;
  while (c[low] == Complex(0.0)) ++low;
  std::vector<Complex> roots(low, Complex(0.0));
  const std::size_t m = static_cast<std::size_t>(d) - low;
  if (m > 0) {
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    const Complex lead = c[static_cast<std::size_t>(d)];
    for (std::size_t i = 0; i < m; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (i + 1 < m) C(ii + 1, ii) = 1.0;
      C(ii, static_cast<Eigen::Index>(m) - 1) = -c[low + i] / lead;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(C, false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("companion eigenvalue solver failed");
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) roots.push_back(solver.eigenvalues()(i));
  }
  for (const auto& z : roots) {
    double scale = 0.0;
    double zp = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i, zp *= std::abs(z)) scale += std::abs(c[i]) * zp;
    if (std::abs(P.evaluate(std::span<const Complex>(&z, 1))) > 1e-8 * scale) {
      throw std::runtime_error("root residual too large");
    }
  }
  return roots;
}

double poly_ratio_at(const FloatPoly& P, const std::vector<Complex>& roots, Complex z) {
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& r : roots) dist = std::min(dist, std::abs(z - r));
  const double d = static_cast<double>(std::max(P.degree(), 0));
  return std::abs(P.evaluate(std::span<const Complex>(&z, 1))) / std::pow(dist, d);
}

PolyBoundReport poly_lower_bound_ratio(const FloatPoly& P, std::size_t samples, std::uint64_t seed) {
  if (P.n() != 1) throw std::invalid_argument("lower bound needs a univariate polynomial");
  if (std::abs(P.norm_l1() - 1.0) > 1e-12) throw std::invalid_argument("lower bound needs ||P||_1 = 1");
  if (samples == 0) throw std::invalid_argument("lower bound needs samples");
  PolyBoundReport rep;
  rep.degree = static_cast<std::size_t>(P.degree());
  rep.roots = polynomial_roots(P);
  rep.sample_count = samples;
  rep.seed = seed;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  const auto shift = halton_shift(2, seed);
  for (std::size_t j = 0; j < samples; ++j) {
    // Area-uniform map of the unit square onto the disc.
    const double rad = std::sqrt(halton(j + 1, 0, shift));
    const Complex z = std::polar(rad, kTwoPi * halton(j + 1, 1, shift));
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.roots) dist = std::min(dist, std::abs(z - r));
    if (rep.degree > 0 && dist == 0.0) continue;
    const double ratio = poly_ratio_at(P, rep.roots, z);
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.argmin = z;
    }
  }
  if (!(rep.min_ratio > 0.0)) throw std::runtime_error("sampled lower bound ratio is not positive");
  return rep;
}

// ---- fitted constants -------------------------------------------------------

void UniversalConstants::add(EmpiricalConstant c) {
  if (!(c.value > 0.0) || !std::isfinite(c.value)) throw std::invalid_argument("constant estimate must be positive");
  for (auto& e : estimates) {
    if (e.name == c.name && e.family == c.family) {
      e = std::move(c);
      return;
    }
  }
  estimates.push_back(std::move(c));
}

const EmpiricalConstant* UniversalConstants::find(const std::string& name, const std::string& family) const {
  for (const auto& e : estimates) {
    if (e.name == name && e.family == family) return &e;
  }
  return nullptr;
}

EmpiricalConstant fit_polydisc_constant(const PolydiscTable& table) {
  std::size_t used = 0;
  for (const auto& r : table.rows) used += r.skipped ? 0 : 1;
  if (used == 0) throw std::invalid_argument("no usable rows to fit C_Z");
  return {"C_Z", table.C_Z_est, table.family, used, 0};
}

std::vector<EmpiricalConstant> fit_growth_constants(const std::vector<GrowthReport>& reports,
                                                    const std::string& family) {
  if (reports.empty()) throw std::invalid_argument("no growth reports to fit");
  double a = std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (const auto& r : reports) {
    a = std::min(a, r.r_tilde / r.r);
    b = std::min(b, r.ratio);
    n += r.sample_count;
  }
  const std::uint64_t seed = reports.front().seed;
  return {{"A", a, family, n, seed}, {"B", b, family, n, seed}};
}

std::vector<EmpiricalConstant> fit_perturbation_constants(const std::vector<PerturbationReport>& reports,
                                                          const std::string& family) {
  double a = std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  std::optional<PerturbationMode> mode;
  std::uint64_t seed = 0;
  for (const auto& r : reports) {
    if (!r.found) continue;
    if (mode && *mode != r.mode) throw std::invalid_argument("perturbation reports mix modes");
    mode = r.mode;
    seed = r.seed;
    a = std::min(a, r.r_tilde / r.r_max_admissible);
    b = std::min(b, r.r_max_admissible / r.s);
    n += r.sample_count;
  }
  if (!mode) throw std::invalid_argument("no successful perturbation reports to fit");
  const std::string p = *mode == PerturbationMode::Direct ? "'" : "''";
  return {{"A" + p, a, family, n, seed}, {"B" + p, b, family, n, seed}};
}

EmpiricalConstant fit_poly_constant(const std::vector<PolyBoundReport>& reports, const std::string& family) {
  if (reports.empty()) throw std::invalid_argument("no polynomial reports to fit");
  const std::size_t d = reports.front().degree;
  double c = std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (const auto& r : reports) {
    if (r.degree != d) throw std::invalid_argument("polynomial reports mix degrees");
    c = std::min(c, r.min_ratio);
    n += r.sample_count;
  }
  return {"C_" + std::to_string(d), c, family, n, reports.front().seed};
}

}  // namespace mop
