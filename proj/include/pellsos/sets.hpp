#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pellsos/literal.hpp"
#include "pellsos/measures.hpp"
#include "pellsos/moments.hpp"

namespace pellsos {

/// A named semi-algebraic set plus, when known, its equilibrium measure.
struct SetDefinition {
  GeneratorSet set;
  std::optional<std::string> known_measure;  // model key
};

namespace detail {
inline Poly<Rational> parse_poly2(std::initializer_list<std::pair<std::pair<int, int>, long long>> terms) {
  Poly<Rational> p(2);
  for (const auto& [e, c] : terms) p.add_term(MultiIndex(std::vector<int>{e.first, e.second}), Rational(c));
  return p;
}
}  // namespace detail

inline SetDefinition interval_set() {
  Poly<Rational> g(1);
  g.add_term(MultiIndex(std::vector<int>{0}), Rational(1));
  g.add_term(MultiIndex(std::vector<int>{2}), Rational(-1));
  return {GeneratorSet("interval", 1, {g}, 1.0, {"1-x^2"}), "interval"};
}

inline SetDefinition box2d_set() {
  auto g1 = detail::parse_poly2({{{0, 0}, 1}, {{2, 0}, -1}});
  auto g2 = detail::parse_poly2({{{0, 0}, 1}, {{0, 2}, -1}});
  auto g3 = g1 * g2;
  return {GeneratorSet("box2d", 2, {g1, g2, g3}, 2.0, {"1-x^2", "1-y^2", "(1-x^2)(1-y^2)"}), "box2d"};
}

inline SetDefinition ball2d_set() {
  auto g = detail::parse_poly2({{{0, 0}, 1}, {{2, 0}, -1}, {{0, 2}, -1}});
  return {GeneratorSet("ball2d", 2, {g}, 1.0, {"1-x^2-y^2"}), "ball2d"};
}

inline SetDefinition simplex2d_set() {
  auto rest = detail::parse_poly2({{{0, 0}, 1}, {{1, 0}, -1}, {{0, 1}, -1}});
  auto x = detail::parse_poly2({{{1, 0}, 1}});
  auto y = detail::parse_poly2({{{0, 1}, 1}});
  return {GeneratorSet("simplex2d", 2, {x * rest, y * rest, x * y}, 1.0, {"x(1-x-y)", "y(1-x-y)", "xy"}),
          "simplex2d"};
}

inline SetDefinition ellipsoids2_set() {
  auto g1 = detail::parse_poly2({{{0, 0}, 1}, {{2, 0}, -2}, {{0, 2}, -3}});
  auto g2 = detail::parse_poly2({{{0, 0}, 1}, {{2, 0}, -3}, {{0, 2}, -2}});
  // (g1 + g2) / 5 = 2/5 - |x|^2
  return {GeneratorSet("ellipsoids2", 2, {g1, g2}, 0.4, {"1-2x^2-3y^2", "1-3x^2-2y^2"}), std::nullopt};
}

inline SetDefinition tvscreen_set() {
  auto g = detail::parse_poly2({{{0, 0}, 1}, {{4, 0}, -1}, {{0, 4}, -1}});
  return {GeneratorSet("tvscreen", 2, {g}, std::sqrt(2.0), {"1-x^4-y^4"}), std::nullopt};
}

inline const std::vector<std::string>& builtin_set_names() {
  static const std::vector<std::string> names{"interval", "box2d", "ball2d", "simplex2d", "ellipsoids2", "tvscreen"};
  return names;
}

inline std::optional<SetDefinition> builtin_set(const std::string& name) {
  if (name == "interval") return interval_set();
  if (name == "box2d") return box2d_set();
  if (name == "ball2d") return ball2d_set();
  if (name == "simplex2d") return simplex2d_set();
  if (name == "ellipsoids2") return ellipsoids2_set();
  if (name == "tvscreen") return tvscreen_set();
  return std::nullopt;
}

inline SetDefinition set_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("set definition must be a JSON object");
  for (const char* key : {"name", "n", "R", "generators"})
    if (!j.contains(key)) throw ParseError(std::string("set definition is missing '") + key + "'");
  if (!j.at("name").is_string()) throw ParseError("'name' must be a string");
  if (!j.at("n").is_number_integer() || j.at("n").get<int>() < 1) throw ParseError("'n' must be a positive integer");
  if (!j.at("R").is_number() || !(j.at("R").get<double>() > 0.0)) throw ParseError("'R' must be a positive number");
  if (!j.at("generators").is_array()) throw ParseError("'generators' must be an array");
  const int n = j.at("n").get<int>();
  std::vector<Poly<Rational>> gens;
  std::vector<std::string> labels;
  for (const auto& g : j.at("generators")) {
    const nlohmann::json& terms = g.is_object() ? g.at("terms") : g;
    Poly<Rational> p = poly_from_literal(terms, n);
    if (p.degree() == 0) throw ParseError("generators must not be constants (g_0 = 1 is implicit)");
    labels.push_back(g.is_object() && g.contains("label") ? g.at("label").get<std::string>() : p.str());
    gens.push_back(std::move(p));
  }
  SetDefinition def{GeneratorSet(j.at("name").get<std::string>(), n, std::move(gens), j.at("R").get<double>(), labels),
                    std::nullopt};
  if (j.contains("known_measure") && !j.at("known_measure").is_null()) {
    if (!j.at("known_measure").is_string()) throw ParseError("'known_measure' must be a model key string");
    def.known_measure = j.at("known_measure").get<std::string>();
    const MeasureModel m = model_from_key(*def.known_measure);
    if (m.n != n) throw ParseError("known_measure dimension does not match n");
  }
  return def;
}

inline nlohmann::json set_to_json(const SetDefinition& def) {
  const GeneratorSet& s = def.set;
  nlohmann::json gens = nlohmann::json::array();
  for (std::size_t i = 1; i < s.size(); ++i)
    gens.push_back({{"label", s.labels()[i]}, {"terms", to_literal(s.generators()[i])}});
  nlohmann::json j{{"name", s.name()}, {"n", s.dim()}, {"R", s.radius()}, {"generators", gens}};
  if (def.known_measure) j["known_measure"] = *def.known_measure;
  return j;
}

inline SetDefinition load_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open set file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("set file '" + path + "': " + e.what());
  }
  return set_from_json(j);
}

/// A built-in name, or a path to a JSON set definition.
inline SetDefinition resolve_set(const std::string& name_or_path) {
  if (auto s = builtin_set(name_or_path)) return *s;
  if (name_or_path.find('/') != std::string::npos || name_or_path.ends_with(".json")) return load_set_file(name_or_path);
  throw InvalidArgument("unknown set '" + name_or_path + "'");
}

}  // namespace pellsos
