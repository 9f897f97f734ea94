#pragma once

// JSON encodings shared by the command-line tool and its tests.
//
// Polynomial: {"n": 2, "terms": [{"exp": [1, 0], "re": "1/2", "im": "0"}]}.
// "im" may be omitted; numbers may be "p/q" strings, decimal strings, or
// JSON integers. A system is an array of polynomials (or {"polys": [...]}).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mop/noetherian.hpp"
#include "mop/operators.hpp"
#include "mop/oracle.hpp"
#include "mop/poly.hpp"

namespace mop::io {

using Json = nlohmann::ordered_json;

/// Malformed input; the CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json parse_json_text(std::string_view text);
Json read_json_file(const std::string& path);

GaussRat scalar_from_json(const Json& j);
Json scalar_to_json(const GaussRat& z);
Json scalar_to_json(const Complex& z);
std::string rational_string(const mpq_class& q);
std::string double_string(double v);  // shortest round-trip decimal

ExactPoly poly_from_json(const Json& j);
Json poly_to_json(const ExactPoly& p);
Json poly_to_json(const FloatPoly& p);

PolySystem<GaussRat> system_from_json(const Json& j);
Json system_to_json(const PolySystem<GaussRat>& F);
std::vector<GaussRat> point_from_json(const Json& j, std::size_t n);

NoetherianSystem noetherian_from_json(const Json& j);
CurveParam curve_from_json(const Json& j);

Json multi_index_to_json(const MultiIndex& m);
Json staircase_to_json(const Staircase& B);
Json label_to_json(const ColumnLabel& l);
template <class S>
Json witness_to_json(const OperatorWitness<S>& w) {
  Json cols = Json::array();
  for (const auto& l : w.selected) cols.push_back(label_to_json(l));
  Json out{{"B", staircase_to_json(w.B)}, {"columns", cols}, {"det", scalar_to_json(w.det)}, {"rank", w.rank}};
  if (w.condition) out["condition"] = double_string(*w.condition);
  return out;
}

Json big_bound_to_json(const BigBound& b);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace mop::io
