#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "timecredit/recurrence.hpp"

namespace timecredit::cli {

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace spec_detail {

inline Rational rational_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw SpecError(std::string("field '") + key + "' must be a string");
  try {
    return parse_rational(j[key].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
}

inline Rounding rounding(const nlohmann::json& j) {
  std::string r = j.value("round", "floor");
  if (r == "floor") return Rounding::Floor;
  if (r == "ceil") return Rounding::Ceil;
  throw SpecError("round must be floor or ceil, got '" + r + "'");
}

struct TollSummand {
  Rational coeff;
  unsigned div = 0;  // 0: constant
  Rounding round = Rounding::Floor;
};

}  // namespace spec_detail

inline AkraBazziSpec parse_spec(const nlohmann::json& j) {
  using namespace spec_detail;
  if (!j.is_object()) throw SpecError("spec must be a JSON object");
  AkraBazziSpec s;
  s.name = j.value("name", "spec");
  if (!j.contains("x0") || !j["x0"].is_number_unsigned()) throw SpecError("x0 must be a natural");
  s.x0 = j["x0"].get<std::uint64_t>();
  if (!j.contains("terms") || !j["terms"].is_array()) throw SpecError("terms must be a list");
  for (const auto& t : j["terms"]) {
    if (!t.is_object()) throw SpecError("each term must be an object");
    s.terms.push_back({rational_field(t, "a"), rational_field(t, "b"), rounding(t)});
  }
  if (!j.contains("g") || !j["g"].is_object()) throw SpecError("g must be an object with exponents a and b");
  const auto& g = j["g"];
  if (!g.value("a", nlohmann::json()).is_number_unsigned() || !g.value("b", nlohmann::json(0)).is_number_unsigned()) {
    throw SpecError("g exponents must be naturals");
  }
  s.g_class = PolyLog{g["a"].get<unsigned>(), g.value("b", 0u)};
  if (j.contains("g_concrete")) {
    if (!j["g_concrete"].is_array()) throw SpecError("g_concrete must be a list");
    std::vector<TollSummand> toll;
    for (const auto& t : j["g_concrete"]) {
      if (!t.is_object()) throw SpecError("each g_concrete summand must be an object");
      TollSummand x{rational_field(t, "coeff"), 0, rounding(t)};
      if (t.contains("div")) {
        if (!t["div"].is_number_unsigned() || t["div"].get<unsigned>() == 0) throw SpecError("div must be >= 1");
        x.div = t["div"].get<unsigned>();
      }
      toll.push_back(x);
    }
    s.g_concrete = [toll](std::uint64_t x) {
      Rational v = 0;
      for (const auto& t : toll) {
        if (t.div == 0) {
          v += t.coeff;
        } else {
          v += t.coeff * Rational(ABTerm{1, Rational(1, t.div), t.round}.apply(x));
        }
      }
      return v;
    };
  }
  if (j.contains("base")) {
    if (!j["base"].is_object()) throw SpecError("base must map arguments to values");
    for (const auto& [k, v] : j["base"].items()) {
      std::uint64_t x = 0;
      try {
        std::size_t used = 0;
        x = std::stoull(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        throw SpecError("base key '" + k + "' is not a natural");
      }
      if (!v.is_string()) throw SpecError("base values must be rational strings");
      try {
        s.base[x] = parse_rational(v.get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw SpecError(e.what());
      }
    }
  }
  try {
    validate(s);
  } catch (const std::exception& e) {
    throw SpecError(e.what());
  }
  return s;
}

inline AkraBazziSpec load_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw SpecError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(path + ": " + e.what());
  }
  return parse_spec(j);
}

}  // namespace timecredit::cli
