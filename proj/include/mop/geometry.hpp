#pragma once

// Numerical harnesses for the growth and zero-counting statements: argument
// principle counts, sampled sphere minima, perturbation radii, and the
// univariate lower bound |P(z)| >= C_d dist(z, Z)^d. All constants produced
// here are fitted estimates for the sampled family, never proven values.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mop/operators.hpp"
#include "mop/poly.hpp"

namespace mop {

using AnalyticFn = std::function<Complex(Complex)>;

class NearBoundaryZero : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ZeroCount {
  int count = 0;
  double raw = 0.0;          // winding number before rounding
  std::size_t nodes = 0;     // trapezoid nodes at convergence
  double min_abs = 0.0;      // smallest sampled |f| on the circle
};

/// Winding number of f around the circle |z - center| = radius, from the
/// trapezoid rule for (1/2 pi i) \oint f'/f with node doubling. Throws
/// NearBoundaryZero if a sampled |f| is below 1e-9 * radius * max|f'|, and
/// std::runtime_error on non-convergence or a raw value > 0.1 from an integer.
ZeroCount count_zeros_disc_report(const AnalyticFn& f, const AnalyticFn& df, Complex center, double radius);
int count_zeros_disc(const AnalyticFn& f, const AnalyticFn& df, Complex center, double radius);
int count_zeros_disc(const FloatPoly& f, Complex center, double radius);

/// Low-discrepancy unit vectors in C^n: equispaced angles for n = 1, a
/// shifted Halton sequence pushed through Box-Muller for n >= 2.
std::vector<std::vector<Complex>> sphere_directions(std::size_t n, std::size_t count, std::uint64_t seed);

double euclidean_norm(const std::vector<Complex>& v);
std::vector<Complex> evaluate_system(const PolySystem<Complex>& F, const std::vector<Complex>& z);

// ---- polydisc zero bound -------------------------------------------------

struct ZeroFamily {
  std::string name;
  std::size_t n = 1;
  std::function<PolySystem<GaussRat>(const mpq_class&)> map;
  /// Zeros with multiplicity (a double zero listed twice).
  std::function<std::vector<std::vector<GaussRat>>(const mpq_class&)> zeros;
};

ZeroFamily family_x2_minus_eps2();       // x^2 - e^2, zeros +-e
ZeroFamily family_x2_minus_eps2_diag();  // (x^2 - e^2, y - x), zeros +-(e, e)

struct PolydiscRow {
  mpq_class param;
  bool skipped = false;  // r = 0 or s = 0: ratio undefined
  double r = 0.0;        // smallest polydisc radius holding k+1 zeros
  double s = 0.0;
  double ratio = 0.0;    // s / r
  std::optional<mpq_class> r_exact;
  std::optional<mpq_class> s_exact;
  std::optional<mpq_class> ratio_exact;
};

struct PolydiscTable {
  std::string family;
  std::size_t k = 0;
  std::vector<PolydiscRow> rows;
  double max_ratio = 0.0;
  double C_Z_est = 0.0;  // 1 / max ratio
};

/// Witness at the origin whose columns are chosen by the float complete
/// pivoting rule, with the determinant recomputed exactly.
std::optional<OperatorWitness<GaussRat>> pivoted_exact_witness(const PolySystem<GaussRat>& F, std::size_t k);

/// For each parameter: r, s = |operator at 0| and s/r. Throws
/// std::invalid_argument if the family lists fewer than k+1 zeros or a
/// listed point is not a zero.
PolydiscTable polydisc_zero_bound_check(const ZeroFamily& family, const std::vector<mpq_class>& params,
                                        std::size_t k);

// ---- sphere growth --------------------------------------------------------

struct GrowthReport {
  double r = 0.0;
  double r_tilde = 0.0;
  double min_sphere_norm = 0.0;  // sampled lower estimate on |z| = r_tilde
  double ratio = 0.0;            // min_sphere_norm / (s r_tilde^k)
  double s = 0.0;
  std::size_t k = 0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  bool r_below_s = false;
  std::vector<std::pair<double, double>> candidates;  // (r_tilde, ratio)
};

/// Scores a geometric grid of radii in (r/4, r) by the sampled minimum of
/// ||F|| and returns the best. samples = 0 means 1000 n.
GrowthReport growth_search(const PolySystem<Complex>& F, std::size_t k, double s, double r, std::size_t samples = 0,
                           std::uint64_t seed = 7, std::size_t grid = 16);

// ---- perturbations ---------------------------------------------------------

enum class PerturbationMode { Direct, Power };

struct KnownZeros {
  std::vector<std::vector<Complex>> of_F;
  std::vector<std::vector<Complex>> of_FG;
};

struct PerturbationReport {
  bool found = false;
  PerturbationMode mode = PerturbationMode::Direct;
  double eps = 0.0;
  double s = 0.0;
  bool hypothesis_holds = false;  // jet condition (Direct) or ||G(0)|| < eps (Power)
  double r_tilde = 0.0;           // smallest admissible grid radius with usable counts
  double r_max_admissible = 0.0;  // largest admissible grid radius
  double min_F = 0.0;
  double max_G = 0.0;
  std::optional<int> count_F;
  std::optional<int> count_FG;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::string failure;
  bool counts_equal() const { return count_F && count_FG && *count_F == *count_FG; }
};

/// Smallest radius of a geometric grid in (eps, s) on whose sphere the
/// sampled min ||F|| exceeds the sampled max ||G|| (or ||G^{k+1}||); for
/// n = 1 both zero counts are taken by the argument principle, for n >= 2
/// from `known` when supplied.
PerturbationReport perturbation_radius(const PolySystem<Complex>& F, const PolySystem<Complex>& G, std::size_t k,
                                       double s, double eps, PerturbationMode mode = PerturbationMode::Direct,
                                       std::size_t samples = 0, std::uint64_t seed = 7, std::size_t grid = 64,
                                       const std::optional<KnownZeros>& known = std::nullopt);

/// |coeff of z^a in G_i| <= eps^{k+1-|a|} for all i and |a| <= k.
bool jet_condition(const PolySystem<Complex>& G, std::size_t k, double eps);

// ---- univariate lower bound ------------------------------------------------

/// Roots with multiplicity via companion-matrix eigenvalues (zero roots
/// split off exactly). Throws std::runtime_error if a residual is too large.
std::vector<Complex> polynomial_roots(const FloatPoly& P);

/// |P(z)| / dist(z, roots)^deg P.
double poly_ratio_at(const FloatPoly& P, const std::vector<Complex>& roots, Complex z);

struct PolyBoundReport {
  std::size_t degree = 0;
  double min_ratio = 0.0;
  Complex argmin{};
  std::vector<Complex> roots;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
};

/// Minimum of |P(z)| / dist(z, Z)^d over low-discrepancy samples of the
/// unit disc. Requires a univariate P with ||P||_1 = 1.
PolyBoundReport poly_lower_bound_ratio(const FloatPoly& P, std::size_t samples = 4096, std::uint64_t seed = 7);

// ---- fitted constants -------------------------------------------------------

struct EmpiricalConstant {
  std::string name;  // e.g. "C_Z", "A", "B", "A'", "B'", "A''", "B''", "C_4"
  double value = 0.0;
  std::string family;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
};

/// Fitted stand-ins for the universal constants; every value is positive
/// and labelled with the family and sample size it came from.
struct UniversalConstants {
  std::vector<EmpiricalConstant> estimates;

  void add(EmpiricalConstant c);
  const EmpiricalConstant* find(const std::string& name, const std::string& family) const;
};

/// C_Z = 1 / max ratio.
EmpiricalConstant fit_polydisc_constant(const PolydiscTable& table);
/// A = min r_tilde / r and B = min ratio over the reports.
std::vector<EmpiricalConstant> fit_growth_constants(const std::vector<GrowthReport>& reports, const std::string& family);
/// A' (A'') = min r_tilde / r_max_admissible, B' (B'') = min r_max_admissible / s over found reports.
std::vector<EmpiricalConstant> fit_perturbation_constants(const std::vector<PerturbationReport>& reports,
                                                          const std::string& family);
/// C_d = min ratio over reports of degree d.
EmpiricalConstant fit_poly_constant(const std::vector<PolyBoundReport>& reports, const std::string& family);

}  // namespace mop
