#include "mop/oracle.hpp"

#include <algorithm>
#include <stdexcept>

#include "mop/linalg.hpp"
#include "mop/operators.hpp"

namespace mop {

IdealGens::IdealGens(std::vector<ExactPoly> gens) : generators(std::move(gens)) {
  n = system_dim(generators);
}

std::size_t jet_quotient_dim(const IdealGens& I, std::size_t k) {
  const std::size_t N = jet_dim(I.n, k);
  EchelonBasis basis;
  for (const auto& g : I.generators) {
    if (g.is_zero()) continue;
    const auto low = static_cast<std::size_t>(g.min_degree());
    if (low > k) continue;
    for (const auto& a : monomials_up_to(I.n, k - low)) {
      EchelonBasis::SparseVector v;
      for (const auto& [m, c] : g.terms()) {
        if (m.degree() + a.degree() > k) break;
        v.emplace(grlex_rank(m + a, k), c);
      }
      basis.insert(std::move(v));
      if (basis.rank() == N) return 0;
    }
  }
  return N - basis.rank();
}

MultReport multiplicity(const IdealGens& I, std::size_t kmax) {
  MultReport r;
  for (std::size_t k = 0; k <= kmax; ++k) {
    const std::size_t d = jet_quotient_dim(I, k);
    r.d_sequence.push_back(d);
    r.k_used = k;
    if (d <= k) {
      r.result = d;
      return r;
    }
  }
  return r;
}

HsReport hs_multiplicity(const IdealGens& I, std::size_t trials, std::uint64_t seed, std::size_t kmax) {
  if (trials == 0) throw std::invalid_argument("at least one trial required");
  if (!multiplicity(I, kmax).result) throw std::domain_error("ideal is not m-primary within the cap");
  HsReport out;
  out.trials = trials;
  out.seed = seed;
  Rng rng(seed);
  std::optional<std::size_t> best;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<ExactPoly> tuple;
    for (std::size_t j = 0; j < I.n; ++j) {
      ExactPoly g(I.n);
      for (const auto& f : I.generators) g += f * random_nonzero_gauss_rational(rng, 5);
      tuple.push_back(std::move(g));
    }
    auto r = multiplicity(IdealGens(std::move(tuple)), kmax).result;
    out.per_trial.push_back(r);
    if (r && (!best || *r < *best)) best = r;
  }
  if (!best) throw std::domain_error("no generic reduction terminated under the cap");
  out.value = *best;
  return out;
}

namespace {

// All increasing index tuples of length n drawn from [0, q).
void index_tuples(std::size_t q, std::size_t n, std::size_t from, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == n) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = from; i < q; ++i) {
    cur.push_back(i);
    index_tuples(q, n, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

OperatorIdeal mop_ideal_generators(const IdealGens& I, std::size_t k, const SamplingPolicy& policy) {
  const std::size_t n = I.n;
  OperatorIdeal out{I, I.generators.size(), 0, 0, 0, policy};
  Rng rng(policy.seed);

  std::vector<PolySystem<GaussRat>> tuples;
  if (policy.generator_tuples) {
    std::vector<std::vector<std::size_t>> idx;
    std::vector<std::size_t> cur;
    index_tuples(I.generators.size(), n, 0, cur, idx);
    for (const auto& t : idx) {
      PolySystem<GaussRat> F;
      for (std::size_t i : t) F.push_back(I.generators[i]);
      tuples.push_back(std::move(F));
    }
  }
  for (std::size_t r = 0; r < policy.random_tuples; ++r) {
    PolySystem<GaussRat> F;
    for (std::size_t j = 0; j < n; ++j) {
      ExactPoly g(n);
      for (const auto& f : I.generators) g += f * random_nonzero_gauss_rational(rng, 5);
      F.push_back(std::move(g));
    }
    tuples.push_back(std::move(F));
  }
  out.tuples_sampled = tuples.size();

  const auto basis = JetBasis::make(n, k);
  const auto staircases = enumerate_staircases(n, k);
  auto adjoin = [&](ExactPoly g) {
    if (g.is_zero()) return;
    if (g.degree() > static_cast<int>(policy.degree_cap)) {
      ++out.dropped_by_degree;
      return;
    }
    auto& gens = out.ideal.generators;
    if (std::find(gens.begin(), gens.end(), g) == gens.end()) gens.push_back(std::move(g));
  };

  for (const auto& F : tuples) {
    std::vector<GaussRat> p0(n);
    std::vector<GaussRat> p1(n);
    for (auto& c : p1) c = random_gauss_rational(rng, 5);
    const auto jets0 = jet_at(F, std::span<const GaussRat>(p0), basis);
    const auto jets1 = jet_at(F, std::span<const GaussRat>(p1), basis);
    for (const auto& B : staircases) {
      std::vector<std::vector<ColumnLabel>> selections;
      for (const auto* jets : {&jets0, &jets1}) {
        auto w = witness_minor(build_T(*jets, B));
        if (!w.nonzero()) continue;
        if (std::find(selections.begin(), selections.end(), w.selected) == selections.end()) {
          selections.push_back(std::move(w.selected));
        }
      }
      for (const auto& sel : selections) {
        ++out.operators_computed;
        adjoin(operator_polynomial(F, B, sel));
      }
    }
  }
  return out;
}

std::optional<mpq_class> curve_order(const ExactPoly& f, const CurveParam& gamma) {
  if (gamma.q == 0) throw std::invalid_argument("ramification must be >= 1");
  if (gamma.components.size() != f.n()) throw std::invalid_argument("curve dimension mismatch");
  for (const auto& g : gamma.components) {
    if (g.n() != 1) throw std::invalid_argument("curve components must be univariate");
  }
  const ExactPoly h = f.compose(gamma.components);
  if (h.is_zero()) return std::nullopt;
  mpq_class order(h.min_degree(), static_cast<long>(gamma.q));
  order.canonicalize();
  return order;
}

}  // namespace mop
