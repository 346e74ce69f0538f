#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "pellsos/poly.hpp"

namespace pellsos {

/// Polynomial literal: [{"exponents": [..], "coeff": "p/q" | "1.5" | number}, ...].
inline Poly<Rational> poly_from_literal(const nlohmann::json& j, int n) {
  if (!j.is_array()) throw ParseError("polynomial literal must be a JSON array of terms");
  Poly<Rational> p(n);
  for (const auto& term : j) {
    if (!term.is_object() || !term.contains("exponents") || !term.contains("coeff"))
      throw ParseError("polynomial term needs 'exponents' and 'coeff'");
    const auto& ex = term.at("exponents");
    if (!ex.is_array()) throw ParseError("'exponents' must be an array");
    std::vector<int> e;
    for (const auto& v : ex) {
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ParseError("exponents must be non-negative integers");
      e.push_back(v.get<int>());
    }
    if (static_cast<int>(e.size()) != n)
      throw ParseError("term has " + std::to_string(e.size()) + " exponents, expected " + std::to_string(n));
    const auto& c = term.at("coeff");
    Rational coeff;
    if (c.is_string())
      coeff = parse_rational(c.get<std::string>());
    else if (c.is_number_integer())
      coeff = Rational(c.get<long long>());
    else if (c.is_number())
      coeff = parse_rational(c.dump());
    else
      throw ParseError("'coeff' must be a string or number");
    p.add_term(MultiIndex(std::move(e)), coeff);
  }
  return p;
}

template <class S>
nlohmann::json to_literal(const Poly<S>& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [a, c] : p.terms())
    out.push_back({{"exponents", a.exponents()}, {"coeff", format_scalar(c)}});
  return out;
}

}  // namespace pellsos
