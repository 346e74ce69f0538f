#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pellsos/measures.hpp"
#include "pellsos/moments.hpp"

namespace pellsos {

namespace detail {

/// Rows of L^{-1} v for M = L D L^T, one polynomial per basis element.
template <class S>
std::vector<Poly<S>> triangular_polys(const MomentMatrix<S>& m, const LdlFactor<S>& f) {
  const Dense<S> li = unit_lower_inverse(f.lower);
  const int n = m.basis.front().dim();
  std::vector<Poly<S>> out;
  out.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    Poly<S> y(n);
    for (std::size_t j = 0; j <= i; ++j) y.add_term(m.basis[j], li(i, j));
    out.push_back(std::move(y));
  }
  return out;
}

}  // namespace detail

/// P_alpha^2 for the orthonormal family of M, in basis order. Each square is
/// exact on the rational backend since it equals (L^{-1} v)_alpha^2 / D_alpha.
template <class S>
std::vector<Poly<S>> squared_orthonormal(const MomentMatrix<S>& m, const std::string& label = "M") {
  if (m.size() == 0) throw InvalidArgument("empty moment matrix");
  const LdlFactor<S> f = ldl_factor(m.entries, label);
  std::vector<Poly<S>> ys = detail::triangular_polys(m, f);
  std::vector<Poly<S>> out;
  out.reserve(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out.push_back(ys[i] * ys[i] * S(S(1) / f.diag[i]));
  return out;
}

/// Lambda^{-1}(x) = v(x)^T M^{-1} v(x), built as the sum of squared
/// orthonormal polynomials from the Cholesky factor of M.
template <class S>
Poly<S> christoffel_inverse_poly(const MomentMatrix<S>& m, const std::string& label = "M") {
  Poly<S> sum(m.basis.front().dim());
  for (const auto& sq : squared_orthonormal(m, label)) sum += sq;
  return sum;
}

struct OrthonormalBasis {
  std::vector<MultiIndex> basis;
  /// polys[i] has leading monomial basis[i] with positive coefficient.
  std::vector<Poly<double>> polys;
};

inline OrthonormalBasis orthonormal_basis(const MomentMatrix<double>& m, const std::string& label = "M") {
  if (m.size() == 0) throw InvalidArgument("empty moment matrix");
  const LdlFactor<double> f = ldl_factor(m.entries, label);
  OrthonormalBasis out{m.basis, detail::triangular_polys(m, f)};
  for (std::size_t i = 0; i < out.polys.size(); ++i) out.polys[i] *= 1.0 / std::sqrt(f.diag[i]);
  return out;
}

/// Gram matrix of polynomials under the Riesz functional of phi.
inline Dense<double> gram_matrix(const MomentSequence<double>& phi, const std::vector<Poly<double>>& polys) {
  Dense<double> g(polys.size(), polys.size());
  for (std::size_t i = 0; i < polys.size(); ++i)
    for (std::size_t j = i; j < polys.size(); ++j) g(i, j) = g(j, i) = riesz_apply(phi, polys[i] * polys[j]);
  return g;
}

/// v(x)^T M^{-1} v(x) by a forward triangular solve.
inline double christoffel_eval(const MomentMatrix<double>& m, std::span<const double> x, const std::string& label = "M") {
  const LdlFactor<double> f = ldl_factor(m.entries, label);
  const std::size_t k = m.size();
  std::vector<double> z(k);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double v = Poly<double>::monomial(m.basis[i]).eval(x);
    for (std::size_t j = 0; j < i; ++j) v -= f.lower(i, j) * z[j];
    z[i] = v;
    sum += v * v / f.diag[i];
  }
  return sum;
}

/// p*_t = (sum_{G_t} s(t - t_g))^{-1} sum_{G_t} g Lambda^{g.phi}_{t - t_g}^{-1}.
template <class S>
Poly<S> pstar_density(const GeneratorSet& set, const MomentSequence<S>& phi, int t) {
  if (t < 0) throw InvalidArgument("order must be non-negative");
  Poly<S> sum(set.dim());
  for (std::size_t i : set.active(t)) {
    const auto m = localizing_matrix(phi, set.generators()[i], t - set.half_degree(i));
    sum += set.generators()[i].template cast<S>() * christoffel_inverse_poly(m, set.labels()[i]);
  }
  const S c(static_cast<long long>(set.pell_constant(t)));
  return sum * S(S(1) / c);
}

/// integral of f p*_t d(phi) for each t; tends to phi(f) as t grows when phi
/// is the equilibrium measure.
template <class S>
std::vector<S> weak_convergence_probe(const GeneratorSet& set, const MomentSequence<S>& phi,
                                      const Poly<Rational>& f, const std::vector<int>& orders) {
  std::vector<S> out;
  for (int t : orders) out.push_back(riesz_apply(phi, f.cast<S>() * pstar_density(set, phi, t)));
  return out;
}

inline std::vector<double> weak_convergence_probe(const GeneratorSet& set, const MeasureModel& model,
                                                  const Poly<Rational>& f, const std::vector<int>& orders) {
  int top = 0;
  for (int t : orders) top = std::max(top, 2 * t);
  const auto phi = moment_sequence<double>(model, top + std::max(f.degree(), 0));
  return weak_convergence_probe(set, phi, f, orders);
}

}  // namespace pellsos
