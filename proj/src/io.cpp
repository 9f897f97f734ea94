#include "mop/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mop::io {

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

namespace {

mpq_class number_from_json(const Json& j) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    if (j.is_number_float()) return parse_rational(double_string(j.get<double>()));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  throw InputError("expected a number or numeric string");
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw InputError(std::string("missing field \"") + name + "\"");
  return j.at(name);
}

std::size_t size_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long>() >= 0)) {
    throw InputError(std::string("field \"") + name + "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

GaussRat scalar_from_json(const Json& j) {
  if (j.is_object()) {
    mpq_class re = j.contains("re") ? number_from_json(j.at("re")) : mpq_class(0);
    mpq_class im = j.contains("im") ? number_from_json(j.at("im")) : mpq_class(0);
    return GaussRat(std::move(re), std::move(im));
  }
  return GaussRat(number_from_json(j));
}

std::string rational_string(const mpq_class& q) { return format_rational(q); }

std::string double_string(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json scalar_to_json(const GaussRat& z) { return Json{{"re", rational_string(z.re())}, {"im", rational_string(z.im())}}; }

Json scalar_to_json(const Complex& z) { return Json{{"re", double_string(z.real())}, {"im", double_string(z.imag())}}; }

ExactPoly poly_from_json(const Json& j) {
  const std::size_t n = size_field(j, "n");
  if (n == 0 || n > MultiIndex::kMaxVars) throw InputError("polynomial dimension out of range");
  const Json& terms = field(j, "terms");
  if (!terms.is_array()) throw InputError("\"terms\" must be an array");
  ExactPoly p(n);
  for (const auto& t : terms) {
    const Json& e = field(t, "exp");
    if (!e.is_array() || e.size() != n) throw InputError("term exponent must have n entries");
    std::vector<unsigned> ex;
    for (const auto& v : e) {
      if (!v.is_number_integer() || v.get<long>() < 0) throw InputError("exponents must be non-negative integers");
      ex.push_back(v.get<unsigned>());
    }
    mpq_class re = t.contains("re") ? number_from_json(t.at("re")) : mpq_class(0);
    mpq_class im = t.contains("im") ? number_from_json(t.at("im")) : mpq_class(0);
    p.add_term(MultiIndex(ex), GaussRat(std::move(re), std::move(im)));
  }
  return p;
}

Json poly_to_json(const ExactPoly& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms()) {
    terms.push_back(
        Json{{"exp", multi_index_to_json(m)}, {"re", rational_string(c.re())}, {"im", rational_string(c.im())}});
  }
  return Json{{"n", p.n()}, {"terms", terms}};
}

Json poly_to_json(const FloatPoly& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms()) {
    terms.push_back(Json{{"exp", multi_index_to_json(m)}, {"re", double_string(c.real())}, {"im", double_string(c.imag())}});
  }
  return Json{{"n", p.n()}, {"terms", terms}};
}

PolySystem<GaussRat> system_from_json(const Json& j) {
  const Json& arr = j.is_object() ? field(j, "polys") : j;
  if (!arr.is_array() || arr.empty()) throw InputError("a system is a nonempty array of polynomials");
  PolySystem<GaussRat> F;
  for (const auto& p : arr) F.push_back(poly_from_json(p));
  for (const auto& f : F) {
    if (f.n() != F.front().n()) throw InputError("system polynomials disagree on n");
  }
  return F;
}

Json system_to_json(const PolySystem<GaussRat>& F) {
  Json out = Json::array();
  for (const auto& f : F) out.push_back(poly_to_json(f));
  return out;
}

std::vector<GaussRat> point_from_json(const Json& j, std::size_t n) {
  if (!j.is_array() || j.size() != n) throw InputError("point must be an array of n scalars");
  std::vector<GaussRat> p;
  for (const auto& v : j) p.push_back(scalar_from_json(v));
  return p;
}

NoetherianSystem noetherian_from_json(const Json& j) {
  NoetherianSystem sys;
  sys.n = size_field(j, "n");
  sys.m = size_field(j, "m");
  const Json& P = field(j, "P");
  if (!P.is_array()) throw InputError("\"P\" must be an array of rows");
  for (const auto& row : P) {
    if (!row.is_array()) throw InputError("each row of \"P\" must be an array");
    std::vector<ExactPoly> r;
    for (const auto& p : row) r.push_back(poly_from_json(p));
    sys.P.push_back(std::move(r));
  }
  try {
    sys.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return sys;
}

CurveParam curve_from_json(const Json& j) {
  CurveParam g;
  const Json& comps = j.is_object() ? field(j, "components") : j;
  if (!comps.is_array() || comps.empty()) throw InputError("curve needs a nonempty component array");
  for (const auto& c : comps) {
    ExactPoly p = poly_from_json(c);
    if (p.n() != 1) throw InputError("curve components must be univariate");
    g.components.push_back(std::move(p));
  }
  if (j.is_object() && j.contains("q")) {
    g.q = static_cast<unsigned>(size_field(j, "q"));
    if (g.q == 0) throw InputError("curve q must be positive");
  }
  return g;
}

Json multi_index_to_json(const MultiIndex& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) a.push_back(m[i]);
  return a;
}

Json staircase_to_json(const Staircase& B) {
  Json a = Json::array();
  for (const auto& m : B.elements()) a.push_back(multi_index_to_json(m));
  return a;
}

Json label_to_json(const ColumnLabel& l) {
  if (l.kind == ColumnLabel::Kind::Basis) return Json{{"kind", "basis"}, {"mono", multi_index_to_json(l.mono)}};
  return Json{{"kind", "monomial"}, {"component", l.component}, {"mono", multi_index_to_json(l.mono)}};
}

Json big_bound_to_json(const BigBound& b) {
  Json out{{"exact", b.exact}, {"log10", double_string(b.log10)}};
  out["value"] = b.value ? Json(b.value->get_str()) : Json(nullptr);
  if (b.power) out["power"] = Json{{"base", b.power->first.get_str()}, {"exponent", b.power->second.get_str()}};
  if (!b.notes.empty()) out["notes"] = b.notes;
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace mop::io
