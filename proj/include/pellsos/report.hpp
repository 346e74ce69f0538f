#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <ostream>
#include <string>
#include <vector>

#include "pellsos/christoffel.hpp"
#include "pellsos/literal.hpp"
#include "pellsos/maxdet.hpp"
#include "pellsos/pell.hpp"

// JSON numbers are written by nlohmann's round-trip formatter (up to 17
// significant digits); CSV uses %.17g.

namespace pellsos {

inline nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class S>
nlohmann::json moments_json(const MomentSequence<S>& phi) {
  nlohmann::json entries = nlohmann::json::array();
  const auto& basis = phi.index().basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    nlohmann::json e{{"exponents", basis[i].exponents()}, {"value", to_double(phi.values()[i])}};
    if constexpr (is_exact_v<S>) e["exact"] = format_scalar(phi.values()[i]);
    entries.push_back(std::move(e));
  }
  return {{"n", phi.dim()}, {"order", phi.order()}, {"exact", is_exact_v<S>}, {"moments", entries}};
}

template <class S>
nlohmann::json moment_matrix_json(const MomentMatrix<S>& m) {
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& a : m.basis) basis.push_back(a.exponents());
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) entries.push_back(to_double(m.entries(i, j)));
  return {{"basis", basis}, {"entries", entries}};
}

template <class S>
void moments_csv(std::ostream& out, const MomentSequence<S>& phi) {
  const auto& basis = phi.index().basis();
  for (int k = 0; k < phi.dim(); ++k) out << "a" << k + 1 << ',';
  out << "value";
  if constexpr (is_exact_v<S>) out << ",exact";
  out << '\n';
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (int e : basis[i].exponents()) out << e << ',';
    out << format_double(to_double(phi.values()[i]));
    if constexpr (is_exact_v<S>) out << ',' << format_scalar(phi.values()[i]);
    out << '\n';
  }
}

inline nlohmann::json pell_json(const PellReport& r, const std::string& set_name, const std::string& source) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& p : r.per_generator)
    terms.push_back({{"generator", p.label},
                     {"half_degree", p.half_degree},
                     {"block_size", p.block_size},
                     {"contribution", to_literal(p.contribution)}});
  return {{"kind", "pell"},
          {"set", set_name},
          {"source", source},
          {"t", r.t},
          {"c_t", r.constant},
          {"residual_max", r.residual_max},
          {"tolerance", r.tolerance},
          {"exact", r.exact},
          {"pass", r.pass},
          {"per_generator", terms}};
}

inline nlohmann::json solve_json(const SolveReport& r) {
  nlohmann::json dual = nlohmann::json::array();
  for (std::size_t i = 0; i < r.dual.size(); ++i) dual.push_back({{"generator", r.labels[i]}, {"Q", matrix_json(r.dual[i])}});
  nlohmann::json j{{"kind", "solve"},
                   {"set", r.set_name},
                   {"t", r.t},
                   {"converged", r.converged},
                   {"rho", r.rho},
                   {"phi", moments_json(r.phi)},
                   {"dual", dual},
                   {"stationarity_residual", r.stationarity_residual},
                   {"newton_decrement", r.decrement},
                   {"iterations", r.iterations},
                   {"backtracks", r.backtracks},
                   {"wall_seconds", r.wall_seconds}};
  if (!r.trace.empty()) {
    nlohmann::json tr = nlohmann::json::array();
    for (const auto& it : r.trace)
      tr.push_back({{"iteration", it.iteration},
                    {"objective", it.objective},
                    {"decrement", it.decrement},
                    {"step", it.step},
                    {"backtracks", it.backtracks},
                    {"moment_bound_ratio", it.moment_bound_ratio}});
    j["trace"] = tr;
  }
  return j;
}

inline nlohmann::json certificate_json(const DualCertificate& c) {
  return {{"constant", c.constant},
          {"residual_max", c.residual_max},
          {"rho_primal", c.rho_primal},
          {"rho_dual", c.rho_dual},
          {"duality_gap", c.duality_gap}};
}

inline nlohmann::json extension_json(const ExtensionTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"t", r.t}, {"t_next", r.t + 1}, {"distance", r.distance}, {"extension", r.extension}});
  nlohmann::json solves = nlohmann::json::array();
  for (const auto& s : table.solves)
    solves.push_back({{"t", s.t}, {"rho", s.rho}, {"iterations", s.iterations}, {"wall_seconds", s.wall_seconds}});
  nlohmann::json j{{"kind", "extension"}, {"set", table.set_name}, {"tolerance", table.tolerance},
                   {"rows", rows},       {"solves", solves}};
  j["error"] = table.error ? nlohmann::json(*table.error) : nlohmann::json(nullptr);
  return j;
}

inline void extension_csv(std::ostream& out, const ExtensionTable& table) {
  out << "t,t_next,distance,extension\n";
  for (const auto& r : table.rows)
    out << r.t << ',' << r.t + 1 << ',' << format_double(r.distance) << ',' << (r.extension ? "yes" : "no") << '\n';
}

}  // namespace pellsos
