#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pellsos/multi_index.hpp"
#include "pellsos/scalar.hpp"

namespace pellsos {

/// Sparse polynomial in n variables with canonical (zero-free) term map.
/// The scalar backend is either Rational (exact) or double.
template <class S>
class Poly {
public:
  using Scalar = S;
  using TermMap = std::map<MultiIndex, S, GradedLex>;

  Poly() = default;
  explicit Poly(int n) : n_(n) {
    if (n < 1) throw InvalidArgument("polynomial dimension must be at least 1");
  }

  static Poly constant(int n, const S& c) {
    Poly p(n);
    p.add_term(MultiIndex::zero(n), c);
    return p;
  }

  static Poly monomial(const MultiIndex& a, const S& c = S(1)) {
    Poly p(a.dim());
    p.add_term(a, c);
    return p;
  }

  static Poly variable(int n, int i) { return monomial(MultiIndex::unit(n, i)); }

  int dim() const noexcept { return n_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  S coeff(const MultiIndex& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? S(0) : it->second;
  }

  void add_term(const MultiIndex& a, const S& c) {
    if (a.dim() != n_) throw DimensionMismatch("term dimension does not match polynomial");
    if (pellsos::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(a, c);
    if (!inserted) {
      it->second += c;
      if (pellsos::is_zero(it->second)) terms_.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    check_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
  }

  Poly& operator-=(const Poly& o) {
    check_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, S(-c));
    return *this;
  }

  Poly& operator*=(const S& c) {
    if (pellsos::is_zero(c)) {
      terms_.clear();
      return *this;
    }
    for (auto& [a, v] : terms_) v *= c;
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= S(-1); }
  friend Poly operator*(Poly a, const S& c) { return a *= c; }
  friend Poly operator*(const S& c, Poly a) { return a *= c; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_dim(b);
    Poly out(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) out.add_term(ea + eb, S(ca * cb));
    return out;
  }

  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

  /// Evaluates at a point whose coordinates have type T (double or Rational).
  template <class T>
  T eval(std::span<const T> x) const {
    if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("evaluation point has wrong dimension");
    T sum(0);
    for (const auto& [a, c] : terms_) {
      T term = convert<T>(c);
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < a[i]; ++k) term *= x[static_cast<std::size_t>(i)];
      sum += term;
    }
    return sum;
  }

  double eval(std::span<const double> x) const { return eval<double>(x); }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [a, c] : terms_) m = std::max(m, std::abs(to_double(c)));
    return m;
  }

  template <class T>
  Poly<T> cast() const {
    Poly<T> out(n_);
    for (const auto& [a, c] : terms_) out.add_term(a, convert<T>(c));
    return out;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [a, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + format_scalar(c) + ")";
      for (int i = 0; i < n_; ++i) {
        if (a[i] == 0) continue;
        s += "*x" + std::to_string(i + 1);
        if (a[i] > 1) s += "^" + std::to_string(a[i]);
      }
    }
    return s;
  }

private:
  template <class T, class U>
  static T convert(const U& v) {
    if constexpr (std::is_same_v<T, U>) {
      return v;
    } else if constexpr (std::is_same_v<U, Rational>) {
      return from_rational<T>(v);
    } else {
      return T(v);
    }
  }

  void check_dim(const Poly& o) const {
    if (o.n_ != n_) throw DimensionMismatch("polynomials of dimension " + std::to_string(n_) + " and " +
                                            std::to_string(o.n_));
  }

  int n_ = 1;
  TermMap terms_;
};

enum class ChebyshevKind { first, second };

/// T_n or U_n from the three-term recurrence, with exact integer coefficients.
inline Poly<Rational> chebyshev(ChebyshevKind kind, int order) {
  if (order < 0) throw InvalidArgument("Chebyshev order must be non-negative");
  const Poly<Rational> x = Poly<Rational>::variable(1, 0);
  Poly<Rational> prev = Poly<Rational>::constant(1, Rational(1));
  if (order == 0) return prev;
  Poly<Rational> cur = kind == ChebyshevKind::first ? x : x * Rational(2);
  for (int k = 1; k < order; ++k) {
    Poly<Rational> next = x * cur * Rational(2) - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace pellsos
