#include "mop/valiron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "mop/scalar.hpp"

namespace mop {

double log_rational(const mpq_class& q) {
  if (sgn(q) <= 0) throw std::domain_error("log of non-positive rational");
  long enum_ = 0;
  long eden = 0;
  const double mn = mpz_get_d_2exp(&enum_, q.get_num_mpz_t());
  const double md = mpz_get_d_2exp(&eden, q.get_den_mpz_t());
  return std::log(mn) - std::log(md) + static_cast<double>(enum_ - eden) * std::log(2.0);
}

void validate(const ValironInstance& inst) {
  if (inst.rows.empty()) throw std::invalid_argument("Valiron instance has no rows");
  const std::size_t len = inst.rows.front().size();
  if (len < 2) throw std::invalid_argument("Valiron rows need k+2 >= 2 entries");
  if (!(inst.A > 1)) throw std::invalid_argument("Valiron A must exceed 1");
  if (!(inst.t0 > 0)) throw std::invalid_argument("Valiron t0 must be positive");
  for (const auto& row : inst.rows) {
    if (row.size() != len) throw std::invalid_argument("Valiron rows differ in length");
    mpq_class sum(0);
    for (const auto& a : row) {
      if (sgn(a) < 0) throw std::invalid_argument("Valiron entries must be non-negative");
    }
    for (std::size_t i = 0; i + 1 < len; ++i) sum += row[i];
    if (sum != 1) throw std::invalid_argument("Valiron rows must have a_0 + ... + a_k = 1");
    if (row.back() > inst.M) throw std::invalid_argument("Valiron last entry exceeds M");
  }
}

mpq_class valiron_lower_bound(const ValironInstance& inst) {
  const std::size_t k = inst.rows.front().size() - 2;
  const mpq_class base = 2 * inst.A + 1;
  const long e = static_cast<long>(2 * inst.rows.size() * (k + 1));
  mpq_class m = inst.t0;
  if (sgn(inst.M) > 0) {
    mpq_class other = 1 / (inst.M * static_cast<long>(k + 1));
    if (other < m) m = other;
  }
  return m * pow_rational(base, -e);
}

namespace {

std::size_t dominant_index(const std::vector<mpq_class>& row, const mpq_class& t) {
  const std::size_t k = row.size() - 2;
  std::size_t best = 0;
  mpq_class best_val(-1);
  mpq_class tp(1);
  for (std::size_t i = 0; i <= k; ++i) {
    mpq_class v = tp * row[i];
    if (v > best_val) {
      best_val = v;
      best = i;
    }
    tp *= t;
  }
  return best;
}

// Slopes of the upper concave hull of (i, log_B a_i) over positive entries.
std::vector<double> hull_slopes(const std::vector<mpq_class>& row, double log_base) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (sgn(row[i]) > 0) pts.emplace_back(static_cast<double>(i), log_rational(row[i]) / log_base);
  }
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      // Drop b when it lies on or below the chord a -> p.
      const double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
      if (cross >= 0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  std::vector<double> slopes;
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    slopes.push_back((hull[i + 1].second - hull[i].second) / (hull[i + 1].first - hull[i].first));
  }
  return slopes;
}

// B^tau as an exact rational: B^{floor tau} exactly times the double B^{frac}.
mpq_class rational_power(const mpq_class& base, double tau) {
  const double fl = std::floor(tau);
  const double frac = tau - fl;
  mpq_class r = pow_rational(base, static_cast<long>(fl));
  r *= mpq_class(std::pow(base.get_d(), frac));
  return r;
}

}  // namespace

bool valiron_dominates(const ValironInstance& inst, const mpq_class& t, const std::vector<std::size_t>& index) {
  if (index.size() != inst.rows.size()) return false;
  if (!(t > 0) || t > inst.t0) return false;
  for (std::size_t j = 0; j < inst.rows.size(); ++j) {
    const auto& row = inst.rows[j];
    if (index[j] + 2 > row.size()) return false;
    mpq_class lead;
    mpq_class rest(0);
    mpq_class tp(1);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == index[j]) {
        lead = tp * row[i];
      } else {
        rest += tp * row[i];
      }
      tp *= t;
    }
    if (lead < inst.A * rest) return false;
  }
  return true;
}

ValironResult valiron_select(const ValironInstance& inst) {
  validate(inst);
  const std::size_t k = inst.rows.front().size() - 2;
  const mpq_class base = 2 * inst.A + 1;
  const double log_base = log_rational(base);

  std::vector<std::pair<double, double>> excluded;  // open intervals in log_B t
  double tau = log_rational(inst.t0) / log_base;
  for (const auto& row : inst.rows) {
    const auto slopes = hull_slopes(row, log_base);
    for (double d : slopes) excluded.emplace_back(-d - 1.0, -d + 1.0);
    // The maximum of phi + i*tau must not sit at k+1.
    if (sgn(row[k + 1]) > 0 && !slopes.empty()) tau = std::min(tau, -slopes.back());
  }

  auto descend = [&](double start) {
    double cur = start;
    bool moved = true;
    while (moved) {
      moved = false;
      for (const auto& [lo, hi] : excluded) {
        if (lo < cur && cur < hi) {
          cur = lo;
          moved = true;
        }
      }
    }
    return cur;
  };

  ValironResult out;
  auto accept = [&](const mpq_class& t) {
    std::vector<std::size_t> index;
    for (const auto& row : inst.rows) index.push_back(dominant_index(row, t));
    if (!valiron_dominates(inst, t, index)) return false;
    out.t = t;
    out.index = std::move(index);
    out.feasible = true;
    out.bound_holds = t >= valiron_lower_bound(inst);
    return true;
  };
  // t0 itself is the largest candidate.
  if (accept(inst.t0)) return out;
  double nudge = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double cur = descend(tau - nudge);
    mpq_class t = rational_power(base, cur);
    if (t > inst.t0) t = inst.t0;
    if (accept(t)) return out;
    nudge = nudge == 0.0 ? 1e-9 : nudge * 16.0;
  }
  throw std::logic_error("Valiron selection failed exact verification");
}

}  // namespace mop
