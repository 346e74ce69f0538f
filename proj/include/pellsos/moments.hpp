#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pellsos/dense.hpp"
#include "pellsos/poly.hpp"

namespace pellsos {

/// Truncated moment vector (phi_alpha) for |alpha| <= order, stored in
/// graded-lex position order.
template <class S>
class MomentSequence {
public:
  MomentSequence() = default;
  MomentSequence(int n, int order) : index_(n, order), values_(index_.size(), S(0)) {}

  MomentSequence(int n, int order, const std::function<S(const MultiIndex&)>& value) : MomentSequence(n, order) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = value(index_[i]);
  }

  int dim() const noexcept { return index_.dim(); }
  int order() const noexcept { return index_.max_degree(); }
  std::size_t size() const noexcept { return values_.size(); }
  const MonomialIndex& index() const noexcept { return index_; }
  const std::vector<S>& values() const noexcept { return values_; }
  std::vector<S>& values() noexcept { return values_; }

  const S& operator[](const MultiIndex& a) const { return values_[index_.position(a)]; }
  S& operator[](const MultiIndex& a) { return values_[index_.position(a)]; }

  MomentSequence restrict(int order) const {
    if (order > this->order()) throw DegreeOverflow("cannot restrict to a higher order");
    MomentSequence out(dim(), order);
    std::copy_n(values_.begin(), out.size(), out.values_.begin());
    return out;
  }

  template <class T>
  MomentSequence<T> cast() const {
    MomentSequence<T> out(dim(), order());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if constexpr (std::is_same_v<S, Rational>)
        out.values()[i] = from_rational<T>(values_[i]);
      else
        out.values()[i] = T(values_[i]);
    }
    return out;
  }

private:
  MonomialIndex index_;
  std::vector<S> values_;
};

/// Symmetric matrix with rows and columns indexed by a monomial basis.
template <class S>
struct MomentMatrix {
  std::vector<MultiIndex> basis;
  Dense<S> entries;

  std::size_t size() const noexcept { return basis.size(); }
};

/// The set description G = {g_0 = 1, g_1, ..., g_m} with bounding radius R
/// such that R - |x|^2 is certified nonnegative on S.
class GeneratorSet {
public:
  GeneratorSet() = default;

  GeneratorSet(std::string name, int n, std::vector<Poly<Rational>> generators, double radius,
               std::vector<std::string> labels = {})
      : name_(std::move(name)), n_(n), radius_(radius) {
    if (n < 1) throw InvalidArgument("set dimension must be at least 1");
    if (!(radius > 0.0)) throw InvalidArgument("radius R must be positive");
    generators_.push_back(Poly<Rational>::constant(n, Rational(1)));
    labels_.push_back("1");
    for (std::size_t i = 0; i < generators.size(); ++i) {
      auto& g = generators[i];
      if (g.dim() != n) throw DimensionMismatch("generator dimension does not match set dimension");
      if (g.is_zero()) throw InvalidArgument("generator must be a nonzero polynomial");
      labels_.push_back(i < labels.size() ? labels[i] : g.str());
      generators_.push_back(std::move(g));
    }
  }

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return n_; }
  double radius() const noexcept { return radius_; }
  /// Includes g_0 = 1 at position 0.
  const std::vector<Poly<Rational>>& generators() const noexcept { return generators_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return generators_.size(); }

  int half_degree(std::size_t i) const { return pellsos::half_degree(generators_.at(i).degree()); }

  /// Positions of G_t = {g : t_g <= t}.
  std::vector<std::size_t> active(int t) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < generators_.size(); ++i)
      if (half_degree(i) <= t) out.push_back(i);
    return out;
  }

  /// sum over G_t of s(t - t_g).
  std::size_t pell_constant(int t) const {
    std::size_t c = 0;
    for (std::size_t i : active(t)) c += basis_size(n_, t - half_degree(i));
    return c;
  }

private:
  std::string name_;
  int n_ = 1;
  double radius_ = 1.0;
  std::vector<Poly<Rational>> generators_;
  std::vector<std::string> labels_;
};

namespace detail {
template <class S, class C>
S to_backend(const C& c) {
  if constexpr (std::is_same_v<S, C>)
    return c;
  else if constexpr (std::is_same_v<C, Rational>)
    return from_rational<S>(c);
  else
    return S(c);
}

template <class S>
void check_dim(const MomentSequence<S>& phi, int n) {
  if (phi.dim() != n)
    throw DimensionMismatch("moment sequence of dimension " + std::to_string(phi.dim()) +
                            " used with dimension " + std::to_string(n));
}
}  // namespace detail

/// phi(p) = sum_alpha p_alpha phi_alpha.
template <class S, class C>
S riesz_apply(const MomentSequence<S>& phi, const Poly<C>& p) {
  detail::check_dim(phi, p.dim());
  if (p.degree() > phi.order())
    throw DegreeOverflow("polynomial of degree " + std::to_string(p.degree()) + " exceeds moment order " +
                         std::to_string(phi.order()));
  S sum(0);
  for (const auto& [a, c] : p.terms()) sum += detail::to_backend<S>(c) * phi[a];
  return sum;
}

/// (g.phi)_alpha = sum_gamma g_gamma phi_{alpha+gamma}, truncated to order - 2 t_g.
template <class S, class C>
MomentSequence<S> shifted_sequence(const MomentSequence<S>& phi, const Poly<C>& g) {
  detail::check_dim(phi, g.dim());
  const int out_order = phi.order() - 2 * half_degree(g.degree());
  if (out_order < 0) throw DegreeOverflow("moment order too small to shift by this generator");
  MomentSequence<S> out(phi.dim(), out_order);
  for (std::size_t i = 0; i < out.size(); ++i) {
    S v(0);
    for (const auto& [gamma, c] : g.terms()) v += detail::to_backend<S>(c) * phi[out.index()[i] + gamma];
    out.values()[i] = v;
  }
  return out;
}

/// M_t(g.phi)(alpha, beta) = sum_gamma g_gamma phi_{alpha+beta+gamma}.
template <class S, class C>
MomentMatrix<S> localizing_matrix(const MomentSequence<S>& phi, const Poly<C>& g, int t) {
  detail::check_dim(phi, g.dim());
  if (t < 0) throw InvalidArgument("matrix order must be non-negative");
  if (2 * t + 2 * half_degree(g.degree()) > phi.order())
    throw DegreeOverflow("localizing matrix of order " + std::to_string(t) + " needs moments of degree " +
                         std::to_string(2 * t + 2 * half_degree(g.degree())) + ", have " +
                         std::to_string(phi.order()));
  MomentMatrix<S> m{monomial_basis(phi.dim(), t), {}};
  const std::size_t k = m.basis.size();
  m.entries = Dense<S>(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      const MultiIndex ab = m.basis[i] + m.basis[j];
      S v(0);
      for (const auto& [gamma, c] : g.terms()) v += detail::to_backend<S>(c) * phi[ab + gamma];
      m.entries(i, j) = v;
      m.entries(j, i) = v;
    }
  return m;
}

template <class S>
MomentMatrix<S> moment_matrix(const MomentSequence<S>& phi, int t) {
  return localizing_matrix(phi, Poly<Rational>::constant(phi.dim(), Rational(1)), t);
}

/// Max-norm distance between phi_low and the restriction of phi_high.
template <class S>
double extension_distance(const MomentSequence<S>& low, const MomentSequence<S>& high) {
  if (low.dim() != high.dim()) throw DimensionMismatch("extension distance across dimensions");
  if (high.order() < low.order()) throw DegreeOverflow("higher sequence has lower order");
  double d = 0.0;
  for (std::size_t i = 0; i < low.size(); ++i)
    d = std::max(d, std::abs(to_double(S(high.values()[i] - low.values()[i]))));
  return d;
}

/// Matrix blocks M_{t - t_g}(g.phi) for every g in G_t, in generator order.
template <class S>
std::vector<MomentMatrix<S>> localizing_blocks(const GeneratorSet& set, const MomentSequence<S>& phi, int t) {
  std::vector<MomentMatrix<S>> out;
  for (std::size_t i : set.active(t))
    out.push_back(localizing_matrix(phi, set.generators()[i], t - set.half_degree(i)));
  return out;
}

}  // namespace pellsos
