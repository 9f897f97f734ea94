// mop: command-line front end. Every command writes one JSON report; exit
// codes are 0 (success), 1 (mathematical failure, report still written) and
// 2 (input error, no report).

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mop/division.hpp"
#include "mop/geometry.hpp"
#include "mop/io.hpp"
#include "mop/noetherian.hpp"
#include "mop/operators.hpp"
#include "mop/oracle.hpp"
#include "mop/staircase.hpp"

using namespace mop;
using io::InputError;
using io::Json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Thrown for conditions like "every operator vanishes" where a report is
// still useful; maps to exit code 1.
class MathFailure : public std::runtime_error {
 public:
  MathFailure(const std::string& what, Json results) : std::runtime_error(what), results_(std::move(results)) {}
  const Json& results() const { return results_; }

 private:
  Json results_;
};

struct Context {
  std::string command;
  Json args = Json::object();
  std::string input_bytes;  // everything the result depends on, for the hash

  Json read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    input_bytes += buf.str();
    input_bytes.push_back('\0');
    return io::parse_json_text(buf.str());
  }
};

Json mag_json(const mpq_class& q) { return io::rational_string(q); }
Json mag_json(double d) { return io::double_string(d); }

template <class S>
PolySystem<S> as_mode(const PolySystem<GaussRat>& F) {
  if constexpr (std::is_same_v<S, GaussRat>) {
    return F;
  } else {
    PolySystem<Complex> out;
    for (const auto& f : F) out.push_back(to_float(f));
    return out;
  }
}

template <class S>
std::vector<S> point_as_mode(const std::vector<GaussRat>& p) {
  std::vector<S> out;
  for (const auto& c : p) {
    if constexpr (std::is_same_v<S, GaussRat>) {
      out.push_back(c);
    } else {
      out.push_back(c.to_complex());
    }
  }
  return out;
}

void check_square(const PolySystem<GaussRat>& F) {
  if (F.size() != F.front().n()) throw InputError("map must have n components in n variables");
}

template <class S>
Json test_results(const PolySystem<GaussRat>& F, const std::vector<GaussRat>& p, std::size_t k, std::size_t cap) {
  const auto Fm = as_mode<S>(F);
  const auto pm = point_as_mode<S>(p);
  const auto res = mult_exceeds(Fm, std::span<const S>(pm), k, cap);
  Json out{{"exceeds", res.exceeds}, {"staircases_checked", res.staircases_checked}};
  out["witness"] = res.witness ? io::witness_to_json(*res.witness) : Json(nullptr);
  out["s"] = io::double_string(res.s);
  return out;
}

template <class S>
OperatorWitness<S> require_witness(const PolySystem<S>& F, std::size_t k) {
  const std::vector<S> origin(F.front().n(), S(0));
  const auto res = mult_exceeds(F, std::span<const S>(origin), k);
  if (!res.witness) {
    throw MathFailure("every basic operator of order k vanishes at the origin",
                      Json{{"exceeds", true}, {"staircases_checked", res.staircases_checked}});
  }
  return *res.witness;
}

template <class S>
Json decomposition_json(const Decomposition<S>& d) {
  Json c = Json::array();
  for (const auto& [b, v] : d.c) c.push_back(Json{{"b", io::multi_index_to_json(b)}, {"value", io::scalar_to_json(v)}});
  Json U = Json::array();
  for (const auto& u : d.U) U.push_back(io::poly_to_json(u));
  const auto& cert = d.certificate;
  Json certificate{{"s", io::double_string(cert.s)},       {"norm_P", mag_json(cert.norm_P)},
                   {"max_c", mag_json(cert.max_c)},         {"max_U", mag_json(cert.max_U)},
                   {"norm_E", mag_json(cert.norm_E)},       {"C_inst", mag_json(cert.C_inst)},
                   {"bound_holds", cert.bound_holds},       {"jet_residual", io::double_string(cert.jet_residual)}};
  return Json{{"c", c}, {"U", U}, {"E", io::poly_to_json(d.E)}, {"certificate", certificate}};
}

template <class S>
Json decompose_results(const PolySystem<GaussRat>& F, const ExactPoly& P, std::size_t k) {
  const auto Fm = as_mode<S>(F);
  Poly<S> Pm;
  if constexpr (std::is_same_v<S, GaussRat>) {
    Pm = P;
  } else {
    Pm = to_float(P);
  }
  const auto w = require_witness(Fm, k);
  Json out{{"witness", io::witness_to_json(w)}};
  out["decomposition"] = decomposition_json(cramer_decompose(Pm, Fm, w));
  return out;
}

template <class S>
Json divide_results(const PolySystem<GaussRat>& F, const ExactPoly& P, std::size_t k, std::size_t D_w, double tol) {
  const auto Fm = as_mode<S>(F);
  Poly<S> Pm;
  if constexpr (std::is_same_v<S, GaussRat>) {
    Pm = P;
  } else {
    Pm = to_float(P);
  }
  const auto w = require_witness(Fm, k);
  DivisionResult<S> r;
  try {
    r = weierstrass_divide(Pm, Fm, w, D_w, tol);
  } catch (const ContractionFailure& e) {
    throw MathFailure(e.what(), Json{{"witness", io::witness_to_json(w)}, {"contraction_failure", true}});
  }
  Json u = Json::array();
  for (const auto& p : r.u) u.push_back(io::poly_to_json(p));
  Json certificate{{"t", mag_json(r.t)},
                   {"norm_P_t", mag_json(r.norm_P_t)},
                   {"iterations", r.iterations},
                   {"working_degree", r.working_degree},
                   {"converged", r.converged},
                   {"bound_constant", io::double_string(r.bound_constant)},
                   {"contraction", io::double_string(r.contraction)},
                   {"max_step_ratio", io::double_string(r.max_step_ratio)},
                   {"s", io::double_string(r.s)},
                   {"epsilon", io::double_string(r.epsilon)},
                   {"log10_C_A_inv", io::double_string(r.log10_C_A_inv)},
                   {"C_inst", mag_json(r.C_inst)},
                   {"monomial_bounds_hold", r.monomial_bounds_hold}};
  Json out{{"witness", io::witness_to_json(w)},
           {"u", u},
           {"remainder", io::poly_to_json(r.remainder)},
           {"residualNorm", mag_json(r.residual_norm)},
           {"certificate", certificate}};
  if (!r.converged) throw MathFailure("division did not reach the tolerance", out);
  return out;
}

// ---- experiments -------------------------------------------------------------

double number_field(const Json& j, const char* name, double fallback) {
  if (!j.contains(name)) return fallback;
  const Json& v = j.at(name);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>()).get_d();
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  throw InputError(std::string("field \"") + name + "\" must be numeric");
}

std::size_t count_field(const Json& j, const char* name, std::size_t fallback) {
  if (!j.contains(name)) return fallback;
  const Json& v = j.at(name);
  if (!v.is_number_integer() || v.get<long>() < 0) throw InputError(std::string("field \"") + name + "\" must be a count");
  return v.get<std::size_t>();
}

Json cases_of(const Json& config) {
  if (config.contains("cases")) {
    if (!config.at("cases").is_array() || config.at("cases").empty()) throw InputError("\"cases\" must be a nonempty array");
    return config.at("cases");
  }
  return Json::array({config});
}

double float_witness_s(const PolySystem<GaussRat>& F, std::size_t k) {
  const auto Ff = as_mode<Complex>(F);
  const std::vector<Complex> origin(F.front().n(), Complex(0.0));
  const auto res = mult_exceeds(Ff, std::span<const Complex>(origin), k);
  if (!res.witness) throw MathFailure("every basic operator vanishes at the origin", Json{{"exceeds", true}});
  return res.s;
}

Json constants_json(const std::vector<EmpiricalConstant>& cs) {
  Json out = Json::array();
  for (const auto& c : cs) {
    out.push_back(Json{{"name", c.name},
                       {"value", io::double_string(c.value)},
                       {"family", c.family},
                       {"sample_size", c.sample_size},
                       {"seed", c.seed}});
  }
  return out;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    auto line = [&out](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

Json experiment_zeros(const Json& config, Csv& csv) {
  const std::string name = config.value("family", std::string("x2-eps2"));
  ZeroFamily fam;
  if (name == "x2-eps2") {
    fam = family_x2_minus_eps2();
  } else if (name == "x2-eps2-diag") {
    fam = family_x2_minus_eps2_diag();
  } else {
    throw InputError("unknown zero family " + name);
  }
  const std::size_t k = count_field(config, "k", 1);
  std::vector<mpq_class> params;
  if (config.contains("params")) {
    for (const auto& p : config.at("params")) params.push_back(io::scalar_from_json(p).re());
  } else {
    for (int j = 1; j <= 10; ++j) params.push_back(mpq_class(1, 1UL << j));
  }
  if (params.empty()) throw InputError("no parameters");
  PolydiscTable table;
  try {
    table = polydisc_zero_bound_check(fam, params, k);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  csv.header = {"param", "r", "s", "ratio", "skipped"};
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    Json row{{"param", io::rational_string(r.param)}, {"skipped", r.skipped}, {"r", io::double_string(r.r)},
             {"s", io::double_string(r.s)}, {"ratio", io::double_string(r.ratio)}};
    if (r.r_exact) row["r_exact"] = io::rational_string(*r.r_exact);
    if (r.s_exact) row["s_exact"] = io::rational_string(*r.s_exact);
    if (r.ratio_exact) row["ratio_exact"] = io::rational_string(*r.ratio_exact);
    rows.push_back(row);
    csv.rows.push_back({io::rational_string(r.param), io::double_string(r.r), io::double_string(r.s),
                        io::double_string(r.ratio), r.skipped ? "1" : "0"});
  }
  Json out{{"family", table.family}, {"k", k}, {"rows", rows}, {"max_ratio", io::double_string(table.max_ratio)}};
  std::vector<EmpiricalConstant> cs;
  if (table.max_ratio > 0) cs.push_back(fit_polydisc_constant(table));
  out["constants"] = constants_json(cs);
  return out;
}

Json experiment_growth(const Json& config, std::uint64_t seed, Csv& csv) {
  std::vector<GrowthReport> reports;
  Json items = Json::array();
  csv.header = {"case", "r", "r_tilde", "min_sphere_norm", "ratio", "samples"};
  std::size_t idx = 0;
  for (const auto& c : cases_of(config)) {
    const auto F = io::system_from_json(io::Json(c.at("system")));
    check_square(F);
    const std::size_t k = count_field(c, "k", 1);
    const double s = c.contains("s") ? number_field(c, "s", 0) : float_witness_s(F, k);
    const double r = number_field(c, "r", s / 2);
    const auto rep = growth_search(as_mode<Complex>(F), k, s, r, count_field(c, "samples", 0), seed,
                                   count_field(c, "grid", 16));
    Json cand = Json::array();
    for (const auto& [rt, ratio] : rep.candidates) cand.push_back(Json::array({io::double_string(rt), io::double_string(ratio)}));
    items.push_back(Json{{"k", k},
                         {"s", io::double_string(rep.s)},
                         {"r", io::double_string(rep.r)},
                         {"r_tilde", io::double_string(rep.r_tilde)},
                         {"min_sphere_norm", io::double_string(rep.min_sphere_norm)},
                         {"ratio", io::double_string(rep.ratio)},
                         {"r_below_s", rep.r_below_s},
                         {"sample_count", rep.sample_count},
                         {"seed", rep.seed},
                         {"candidates", cand}});
    csv.rows.push_back({std::to_string(idx++), io::double_string(rep.r), io::double_string(rep.r_tilde),
                        io::double_string(rep.min_sphere_norm), io::double_string(rep.ratio),
                        std::to_string(rep.sample_count)});
    reports.push_back(rep);
  }
  return Json{{"reports", items},
              {"constants", constants_json(fit_growth_constants(reports, config.value("family", std::string("custom"))))}};
}

Json experiment_perturb(const Json& config, std::uint64_t seed, Csv& csv) {
  std::vector<PerturbationReport> reports;
  Json items = Json::array();
  csv.header = {"case", "found", "r_tilde", "min_F", "max_G", "count_F", "count_FG"};
  std::size_t idx = 0;
  bool mismatch = false;
  for (const auto& c : cases_of(config)) {
    const auto F = io::system_from_json(io::Json(c.at("F")));
    const auto G = io::system_from_json(io::Json(c.at("G")));
    check_square(F);
    if (G.size() != F.size() || G.front().n() != F.front().n()) throw InputError("F and G must have the same shape");
    const std::size_t k = count_field(c, "k", 1);
    const double s = c.contains("s") ? number_field(c, "s", 0) : float_witness_s(F, k);
    const double eps = number_field(c, "eps", 0);
    const std::string mode_name = c.value("mode", std::string("direct"));
    if (mode_name != "direct" && mode_name != "power") throw InputError("mode must be direct or power");
    const auto mode = mode_name == "direct" ? PerturbationMode::Direct : PerturbationMode::Power;
    PerturbationReport rep;
    try {
      rep = perturbation_radius(as_mode<Complex>(F), as_mode<Complex>(G), k, s, eps, mode, count_field(c, "samples", 0),
                                seed, count_field(c, "grid", 64));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    auto opt = [](const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); };
    items.push_back(Json{{"k", k},
                         {"mode", mode_name},
                         {"eps", io::double_string(eps)},
                         {"s", io::double_string(s)},
                         {"hypothesis_holds", rep.hypothesis_holds},
                         {"found", rep.found},
                         {"r_tilde", io::double_string(rep.r_tilde)},
                         {"r_max_admissible", io::double_string(rep.r_max_admissible)},
                         {"min_F", io::double_string(rep.min_F)},
                         {"max_G", io::double_string(rep.max_G)},
                         {"count_F", opt(rep.count_F)},
                         {"count_FG", opt(rep.count_FG)},
                         {"sample_count", rep.sample_count},
                         {"seed", rep.seed},
                         {"failure", rep.failure}});
    if (rep.found && rep.count_F && rep.count_FG && *rep.count_F != *rep.count_FG) mismatch = true;
    csv.rows.push_back({std::to_string(idx++), rep.found ? "1" : "0", io::double_string(rep.r_tilde),
                        io::double_string(rep.min_F), io::double_string(rep.max_G),
                        rep.count_F ? std::to_string(*rep.count_F) : "", rep.count_FG ? std::to_string(*rep.count_FG) : ""});
    reports.push_back(rep);
  }
  Json out{{"reports", items}};
  // Constants are fitted per mode.
  Json consts = Json::array();
  for (auto mode : {PerturbationMode::Direct, PerturbationMode::Power}) {
    std::vector<PerturbationReport> same;
    for (const auto& r : reports) {
      if (r.mode == mode && r.found) same.push_back(r);
    }
    if (same.empty()) continue;
    for (auto& c : constants_json(fit_perturbation_constants(same, config.value("family", std::string("custom"))))) {
      consts.push_back(c);
    }
  }
  out["constants"] = consts;
  if (mismatch) throw MathFailure("zero counts differ at an admissible radius", out);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiplicity operators, effective division and multiplicity bounds"};
  app.require_subcommand(1);
  std::string out_path;
  bool timing = false;
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_flag("--timing", timing, "Include wall-clock timings (breaks byte-determinism)");
  app.set_version_flag("--version", kVersion);

  Context ctx;
  std::function<Json()> run;

  // staircases
  auto* st = app.add_subcommand("staircases", "Enumerate staircases of size k in N^n");
  std::size_t st_n = 1, st_k = 1, st_cap = kDefaultStaircaseCap;
  st->add_option("--n", st_n)->required()->check(CLI::Range(1, 8));
  st->add_option("--k", st_k)->required();
  st->add_option("--cap", st_cap)->check(CLI::PositiveNumber);
  st->callback([&] {
    ctx.command = "staircases";
    ctx.args = Json{{"n", st_n}, {"k", st_k}, {"staircase_cap", st_cap}};
    run = [&] {
      Json list = Json::array();
      for (const auto& B : enumerate_staircases(st_n, st_k, st_cap)) list.push_back(io::staircase_to_json(B));
      return Json{{"count", list.size()}, {"staircases", list}};
    };
  });

  // test / operators
  std::string sys_path, point_path, mode = "exact", target_path;
  std::size_t k = 1, cap = kDefaultStaircaseCap;
  bool symbolic = false;
  auto* te = app.add_subcommand("test", "Decide mult_p F > k with the basic operators");
  auto* op = app.add_subcommand("operators", "Report a nonvanishing basic operator");
  for (auto* sub : {te, op}) {
    sub->add_option("--system", sys_path)->required();
    sub->add_option("--point", point_path);
    sub->add_option("--k", k)->required();
    sub->add_option("--mode", mode)->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--cap", cap)->check(CLI::PositiveNumber);
  }
  op->add_flag("--symbolic", symbolic, "Also give the operator as a polynomial in the base point");
  auto test_like = [&](const std::string& name) {
    ctx.command = name;
    ctx.args = Json{{"system", sys_path}, {"point", point_path}, {"k", k}, {"mode", mode}, {"staircase_cap", cap}};
    if (name == "operators") ctx.args["symbolic"] = symbolic;
    run = [&, name] {
      const auto F = io::system_from_json(ctx.read(sys_path));
      check_square(F);
      const std::size_t n = F.front().n();
      const auto p = point_path.empty() ? std::vector<GaussRat>(n, GaussRat(0)) : io::point_from_json(ctx.read(point_path), n);
      if (mode == "float" && symbolic) throw InputError("--symbolic needs exact mode");
      Json res = mode == "exact" ? test_results<GaussRat>(F, p, k, cap) : test_results<Complex>(F, p, k, cap);
      if (name == "operators") {
        if (res["exceeds"].get<bool>()) throw MathFailure("every basic operator of order k vanishes at the point", res);
        if (symbolic) {
          const auto w = mult_exceeds(F, std::span<const GaussRat>(p), k, cap).witness;
          ExactPoly M = operator_polynomial(F, w->B, w->selected);
          res["operator"] = io::poly_to_json(M);
          res["operator_degree"] = M.degree();
        }
      }
      return res;
    };
  };
  te->callback([&] { test_like("test"); });
  op->callback([&] { test_like("operators"); });

  // mult
  std::size_t kmax = kDefaultMultCap;
  auto* mu = app.add_subcommand("mult", "Local multiplicity at the origin from jet colengths");
  mu->add_option("--system", sys_path)->required();
  mu->add_option("--kmax", kmax)->check(CLI::PositiveNumber);
  mu->callback([&] {
    ctx.command = "mult";
    ctx.args = Json{{"system", sys_path}, {"kmax", kmax}};
    run = [&] {
      const auto F = io::system_from_json(ctx.read(sys_path));
      const auto rep = multiplicity(IdealGens(F), kmax);
      Json res{{"k_used", rep.k_used}, {"d_sequence", rep.d_sequence}};
      res["multiplicity"] = rep.result ? Json(*rep.result) : Json(nullptr);
      if (!rep.result) throw MathFailure("colength did not stabilise below kmax", res);
      return res;
    };
  });

  // hs-mult
  std::string ideal_path;
  std::size_t trials = 3;
  std::uint64_t seed = 7;
  auto* hs = app.add_subcommand("hs-mult", "Hilbert-Samuel multiplicity by generic reduction");
  hs->add_option("--ideal", ideal_path)->required();
  hs->add_option("--trials", trials)->check(CLI::PositiveNumber);
  hs->add_option("--seed", seed);
  hs->add_option("--kmax", kmax)->check(CLI::PositiveNumber);
  hs->callback([&] {
    ctx.command = "hs-mult";
    ctx.args = Json{{"ideal", ideal_path}, {"trials", trials}, {"seed", seed}, {"kmax", kmax}};
    run = [&] {
      const Json j = ctx.read(ideal_path);
      const auto gens = io::system_from_json(j.is_object() && j.contains("generators") ? j.at("generators") : j);
      HsReport rep;
      try {
        rep = hs_multiplicity(IdealGens(gens), trials, seed, kmax);
      } catch (const std::domain_error& e) {
        throw MathFailure(e.what(), Json{{"m_primary", false}});
      }
      Json per = Json::array();
      for (const auto& t : rep.per_trial) per.push_back(t ? Json(*t) : Json(nullptr));
      return Json{{"hs_multiplicity", rep.value}, {"trials", rep.trials}, {"seed", rep.seed}, {"per_trial", per}};
    };
  });

  // decompose / divide
  std::size_t working_degree = 0;
  double tol = 1e-10;
  auto* de = app.add_subcommand("decompose", "P = sum c_b x^b + sum U_i f_i + E with j^k E = 0");
  de->add_option("--system", sys_path)->required();
  de->add_option("--target", target_path)->required();
  de->add_option("--k", k)->required();
  de->add_option("--mode", mode)->check(CLI::IsMember({"exact", "float"}));
  de->callback([&] {
    ctx.command = "decompose";
    ctx.args = Json{{"system", sys_path}, {"target", target_path}, {"k", k}, {"mode", mode}};
    run = [&] {
      const auto F = io::system_from_json(ctx.read(sys_path));
      check_square(F);
      const auto P = io::poly_from_json(ctx.read(target_path));
      if (P.n() != F.front().n()) throw InputError("target dimension mismatch");
      return mode == "exact" ? decompose_results<GaussRat>(F, P, k) : decompose_results<Complex>(F, P, k);
    };
  });
  std::string div_mode = "float";
  auto* dv = app.add_subcommand("divide", "Weierstrass division by F with remainder on x^B");
  dv->add_option("--system", sys_path)->required();
  dv->add_option("--target", target_path)->required();
  dv->add_option("--k", k)->required();
  dv->add_option("--working-degree", working_degree);
  dv->add_option("--tol", tol)->check(CLI::PositiveNumber);
  dv->add_option("--mode", div_mode)->check(CLI::IsMember({"exact", "float"}));
  dv->callback([&] {
    ctx.command = "divide";
    if (working_degree == 0) working_degree = default_working_degree(k);
    ctx.args = Json{{"system", sys_path}, {"target", target_path}, {"k", k},
                    {"working_degree", working_degree}, {"tol", io::double_string(tol)}, {"mode", div_mode}};
    run = [&] {
      const auto F = io::system_from_json(ctx.read(sys_path));
      check_square(F);
      const auto P = io::poly_from_json(ctx.read(target_path));
      if (P.n() != F.front().n()) throw InputError("target dimension mismatch");
      if (working_degree < 2 * k) throw InputError("working degree must be at least 2k");
      return div_mode == "exact" ? divide_results<GaussRat>(F, P, k, working_degree, tol)
                                 : divide_results<Complex>(F, P, k, working_degree, tol);
    };
  });

  // curve-order
  std::string poly_path, curve_path;
  auto* co = app.add_subcommand("curve-order", "Order of a polynomial along a parametrised curve");
  co->add_option("--poly", poly_path)->required();
  co->add_option("--curve", curve_path)->required();
  co->callback([&] {
    ctx.command = "curve-order";
    ctx.args = Json{{"poly", poly_path}, {"curve", curve_path}};
    run = [&] {
      const auto f = io::poly_from_json(ctx.read(poly_path));
      const auto g = io::curve_from_json(ctx.read(curve_path));
      if (g.components.size() != f.n()) throw InputError("curve needs one component per variable");
      const auto ord = curve_order(f, g);
      Json res{{"vanishes_on_curve", !ord.has_value()}};
      res["order"] = ord ? Json(io::rational_string(*ord)) : Json(nullptr);
      return res;
    };
  });

  // experiment
  std::string config_path, csv_path;
  auto* ex = app.add_subcommand("experiment", "Growth and zero-counting harnesses");
  ex->require_subcommand(1);
  for (const char* name : {"zeros", "growth", "perturb"}) {
    auto* sub = ex->add_subcommand(name);
    sub->add_option("--config", config_path)->required();
    sub->add_option("--seed", seed);
    sub->add_option("--csv", csv_path, "Also write the table as CSV");
    const std::string which = name;
    sub->callback([&, which] {
      ctx.command = "experiment " + which;
      ctx.args = Json{{"config", config_path}, {"seed", seed}};
      run = [&, which] {
        const Json config = ctx.read(config_path);
        Csv csv;
        Json res;
        try {
          if (which == "zeros") {
            res = experiment_zeros(config, csv);
          } else if (which == "growth") {
            res = experiment_growth(config, seed, csv);
          } else {
            res = experiment_perturb(config, seed, csv);
          }
        } catch (const Json::exception& e) {
          throw InputError(std::string("bad experiment config: ") + e.what());
        }
        if (!csv_path.empty()) csv.write(csv_path);
        return res;
      };
    });
  }

  // noetherian
  auto* no = app.add_subcommand("noetherian", "Noetherian systems and multiplicity bounds");
  no->require_subcommand(1);
  BoundInput bin;
  std::string formula = "gk";
  auto* nb = no->add_subcommand("bound", "Explicit multiplicity bound");
  nb->add_option("--n", bin.n)->required()->check(CLI::PositiveNumber);
  nb->add_option("--m", bin.m)->required()->check(CLI::PositiveNumber);
  nb->add_option("--d", bin.d)->required()->check(CLI::PositiveNumber);
  nb->add_option("--delta", bin.delta)->required()->check(CLI::PositiveNumber);
  nb->add_option("--formula", formula)->check(CLI::IsMember({"gk", "bn"}));
  nb->callback([&] {
    ctx.command = "noetherian bound";
    ctx.args = Json{{"n", bin.n}, {"m", bin.m}, {"d", bin.d}, {"delta", bin.delta}, {"formula", formula}};
    run = [&] {
      if (formula == "bn") return Json{{"bound", io::big_bound_to_json(bn_bound(bin))}};
      const auto g = gk_bound_detail(bin);
      return Json{{"bound", io::big_bound_to_json(g.bound)},
                  {"first", io::big_bound_to_json(g.first)},
                  {"second", io::big_bound_to_json(g.second)},
                  {"Q_lower", io::double_string(g.Q_lower)},
                  {"Q_upper", io::double_string(g.Q_upper)},
                  {"Q_exact", g.Q_exact}};
    };
  });
  std::string noe_path, policy = "canonical";
  auto* nop = no->add_subcommand("operator", "Multiplicity operators on the leaves as ambient polynomials");
  nop->add_option("--system", noe_path)->required();
  nop->add_option("--target", target_path)->required();
  nop->add_option("--k", k)->required();
  nop->add_option("--policy", policy)->check(CLI::IsMember({"canonical", "all"}));
  nop->callback([&] {
    ctx.command = "noetherian operator";
    ctx.args = Json{{"system", noe_path}, {"target", target_path}, {"k", k}, {"policy", policy}};
    run = [&] {
      const auto sys = io::noetherian_from_json(ctx.read(noe_path));
      const Json t = ctx.read(target_path);
      const auto Ps = t.is_array() ? io::system_from_json(t) : PolySystem<GaussRat>{io::poly_from_json(t)};
      if (Ps.size() != sys.n) throw InputError("need one target polynomial per x variable");
      for (const auto& p : Ps) {
        if (p.n() != sys.ambient_dim()) throw InputError("targets must live in the ambient ring (x, f)");
      }
      Json list = Json::array();
      bool all_ok = true;
      std::size_t produced = 0;
      for (const auto& B : enumerate_staircases(sys.n, k)) {
        const auto r = noetherian_operator(Ps, sys, B, policy == "all" ? SelectionPolicy::All : SelectionPolicy::Canonical);
        Json ops = Json::array();
        for (const auto& o : r.operators) {
          Json cols = Json::array();
          for (const auto& l : o.selected) cols.push_back(io::label_to_json(l));
          ops.push_back(Json{{"columns", cols}, {"poly", io::poly_to_json(o.poly)}, {"degree", o.degree}, {"ok", o.ok}});
          all_ok = all_ok && o.ok;
          ++produced;
        }
        list.push_back(Json{{"B", io::staircase_to_json(B)}, {"d", r.d}, {"delta", r.delta}, {"bound", r.bound}, {"operators", ops}});
      }
      Json res{{"staircases", list}, {"operators_found", produced}, {"degree_bound_holds", all_ok}};
      if (!all_ok) throw MathFailure("an operator exceeds the degree bound", res);
      return res;
    };
  });
  auto* nse = no->add_subcommand("semilocal-exponent", "Exponent e = max(D, C(n+K, K)(d + K delta))^N");
  bin = BoundInput{};
  nse->add_option("--n", bin.n)->required()->check(CLI::PositiveNumber);
  nse->add_option("--K", bin.K)->required()->check(CLI::PositiveNumber);
  nse->add_option("--d", bin.d)->check(CLI::PositiveNumber);
  nse->add_option("--delta", bin.delta)->check(CLI::PositiveNumber);
  nse->add_option("--D", bin.D)->required()->check(CLI::PositiveNumber);
  nse->add_option("--N", bin.N)->required()->check(CLI::PositiveNumber);
  nse->callback([&] {
    ctx.command = "noetherian semilocal-exponent";
    ctx.args = Json{{"n", bin.n}, {"K", bin.K}, {"d", bin.d}, {"delta", bin.delta}, {"D", bin.D}, {"N", bin.N}};
    run = [&] { return Json{{"exponent", io::big_bound_to_json(semilocal_exponent(bin))}}; };
  });

  // Global options are accepted after any subcommand too.
  std::function<void(CLI::App*)> fall = [&fall](CLI::App* a) {
    for (auto* sub : a->get_subcommands({})) {
      sub->fallthrough();
      fall(sub);
    }
  };
  fall(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  Json results;
  int code = 0;
  std::string failure;
  try {
    results = run();
  } catch (const MathFailure& e) {
    results = e.results();
    failure = e.what();
    code = 1;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    results = Json::object();
    failure = e.what();
    code = 1;
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  Json report{{"tool", "mop"}, {"version", kVersion}, {"command", ctx.command}, {"args", ctx.args}};
  report["inputs_hash"] = io::hex64(io::fnv1a64(ctx.command + "\n" + ctx.args.dump() + "\n" + ctx.input_bytes));
  report["status"] = code == 0 ? "ok" : "failure";
  if (code != 0) report["failure"] = failure;
  report["results"] = results;
  if (timing) report["timings"] = Json{{"total_ms", io::double_string(ms)}};

  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 2;
    }
    out << text;
  }
  if (code != 0) std::cerr << "failure: " << failure << "\n";
  return code;
}
