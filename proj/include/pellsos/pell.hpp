#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "pellsos/christoffel.hpp"

namespace pellsos {

/// T_n^2 + (1 - x^2) U_{n-1}^2 - 1, identically zero for every n >= 1.
inline Poly<Rational> chebyshev_pell_identity(int n) {
  if (n < 1) throw InvalidArgument("Pell identity needs n >= 1");
  const Poly<Rational> t = chebyshev(ChebyshevKind::first, n);
  const Poly<Rational> u = chebyshev(ChebyshevKind::second, n - 1);
  const MultiIndex x2(std::vector<int>{2});
  const Poly<Rational> g = Poly<Rational>::constant(1, Rational(1)) - Poly<Rational>::monomial(x2);
  return t * t + g * u * u - Poly<Rational>::constant(1, Rational(1));
}

struct PellTerm {
  std::string label;
  int half_degree = 0;
  std::size_t block_size = 0;
  Poly<double> contribution;  // g * Lambda^{-1}
};

struct PellReport {
  int t = 0;
  std::size_t constant = 0;  // c_t = sum over G_t of s(t - t_g)
  double residual_max = 0.0;
  double tolerance = 0.0;
  bool exact = false;
  bool pass = false;
  std::vector<PellTerm> per_generator;
  Poly<double> residual;
};

inline constexpr double kDefaultPellTolerance = 1e-9;

/// Coefficientwise residual of sum_{G_t} g Lambda^{g.phi}_{t-t_g}^{-1} - c_t.
/// On the rational backend the residual is computed exactly.
template <class S>
PellReport generalized_pell_residual(const GeneratorSet& set, const MomentSequence<S>& phi, int t,
                                     double tol = kDefaultPellTolerance) {
  if (t < 0) throw InvalidArgument("order must be non-negative");
  PellReport r;
  r.t = t;
  r.constant = set.pell_constant(t);
  r.tolerance = tol;
  r.exact = is_exact_v<S>;
  Poly<S> residual = Poly<S>::constant(set.dim(), S(-static_cast<long long>(r.constant)));
  for (std::size_t i : set.active(t)) {
    const int k = t - set.half_degree(i);
    const auto m = localizing_matrix(phi, set.generators()[i], k);
    Poly<S> term = set.generators()[i].template cast<S>() * christoffel_inverse_poly(m, set.labels()[i]);
    residual += term;
    r.per_generator.push_back({set.labels()[i], set.half_degree(i), m.size(), term.template cast<double>()});
  }
  r.residual = residual.template cast<double>();
  r.residual_max = residual.max_abs_coeff();
  r.pass = r.residual_max <= tol;
  return r;
}

template <class S>
struct TopSliceReport {
  int t = 0;
  std::size_t constant = 0;  // sum over G_t of C(n - 1 + t - t_g, n - 1)
  Poly<S> residual;
  double residual_max = 0.0;
};

/// sum_{G_t} sum_{|alpha| = t - t_g} g (P^{g.phi}_alpha)^2 minus its expected constant.
template <class S>
TopSliceReport<S> top_slice_check(const GeneratorSet& set, const MomentSequence<S>& phi, int t) {
  if (t < 1) throw InvalidArgument("top-slice identity needs t >= 1");
  const int n = set.dim();
  TopSliceReport<S> r;
  r.t = t;
  Poly<S> sum(n);
  for (std::size_t i : set.active(t)) {
    const int k = t - set.half_degree(i);
    r.constant += binomial(n - 1 + k, n - 1);
    const auto m = localizing_matrix(phi, set.generators()[i], k);
    const auto squares = squared_orthonormal(m, set.labels()[i]);
    Poly<S> top(n);
    for (std::size_t a = 0; a < squares.size(); ++a)
      if (m.basis[a].degree() == k) top += squares[a];
    sum += set.generators()[i].template cast<S>() * top;
  }
  r.residual = sum - Poly<S>::constant(n, S(static_cast<long long>(r.constant)));
  r.residual_max = r.residual.max_abs_coeff();
  return r;
}

struct CertificateMoments {
  MomentMatrix<double> moment_candidate;      // inverse of the Gram matrix of p
  MomentMatrix<double> localizing_candidate;  // inverse of the Gram matrix of q
  MomentSequence<double> fitted;              // least-squares sequence for both
  double fit_residual = 0.0;
  bool consistent = false;
};

namespace detail {
inline Poly<double> gram_poly(const Dense<double>& q, const std::vector<MultiIndex>& basis) {
  Poly<double> p(basis.front().dim());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) p.add_term(basis[i] + basis[j], q(i, j));
  return p;
}
}  // namespace detail

/// Given Gram matrices with v^T A v + g v^T B v = 1, returns A^{-1} and B^{-1}
/// as candidate moment / localizing matrices of one linear functional and
/// checks whether a single moment sequence reproduces both.
inline CertificateMoments certificate_to_moments(const Dense<double>& p_gram, const Dense<double>& q_gram,
                                                 const Poly<Rational>& g, int t, double tol = 1e-10) {
  const int n = g.dim();
  const int tg = half_degree(g.degree());
  if (t < tg) throw InvalidArgument("order t is below the generator half-degree");
  const auto pbasis = monomial_basis(n, t);
  const auto qbasis = monomial_basis(n, t - tg);
  if (p_gram.rows() != pbasis.size() || p_gram.cols() != pbasis.size())
    throw DimensionMismatch("p Gram matrix must be " + std::to_string(pbasis.size()) + " square");
  if (q_gram.rows() != qbasis.size() || q_gram.cols() != qbasis.size())
    throw DimensionMismatch("q Gram matrix must be " + std::to_string(qbasis.size()) + " square");
  ldl_factor(p_gram, "p_gram");
  ldl_factor(q_gram, "q_gram");

  const Poly<double> gd = g.cast<double>();
  const Poly<double> identity = detail::gram_poly(p_gram, pbasis) + gd * detail::gram_poly(q_gram, qbasis) -
                                Poly<double>::constant(n, 1.0);
  if (identity.max_abs_coeff() > tol)
    throw IdentityViolation("p + g q != 1; residual " + identity.str());

  CertificateMoments out;
  out.moment_candidate = {pbasis, spd_inverse(p_gram, "p_gram")};
  out.localizing_candidate = {qbasis, spd_inverse(q_gram, "q_gram")};

  // Linear system in the unknown moments up to degree 2t.
  const MonomialIndex index(n, 2 * t);
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < pbasis.size(); ++i)
    for (std::size_t j = i; j < pbasis.size(); ++j) {
      rows.push_back({{index.position(pbasis[i] + pbasis[j]), 1.0}});
      rhs.push_back(out.moment_candidate.entries(i, j));
    }
  for (std::size_t i = 0; i < qbasis.size(); ++i)
    for (std::size_t j = i; j < qbasis.size(); ++j) {
      std::vector<std::pair<std::size_t, double>> row;
      for (const auto& [gamma, c] : gd.terms()) row.emplace_back(index.position(qbasis[i] + qbasis[j] + gamma), c);
      rows.push_back(std::move(row));
      rhs.push_back(out.localizing_candidate.entries(i, j));
    }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(index.size()));
  Eigen::VectorXd b(static_cast<Eigen::Index>(rhs.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [col, c] : rows[r]) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) += c;
    b(static_cast<Eigen::Index>(r)) = rhs[r];
  }
  const Eigen::VectorXd phi = a.colPivHouseholderQr().solve(b);
  out.fitted = MomentSequence<double>(n, 2 * t);
  for (std::size_t i = 0; i < index.size(); ++i) out.fitted.values()[i] = phi(static_cast<Eigen::Index>(i));
  out.fit_residual = (a * phi - b).cwiseAbs().maxCoeff();
  out.consistent = out.fit_residual <= 1e-8 * std::max(1.0, b.cwiseAbs().maxCoeff());
  return out;
}

}  // namespace pellsos
