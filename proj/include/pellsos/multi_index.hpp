#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "pellsos/errors.hpp"

namespace pellsos {

/// Exponent vector alpha in N^n.
class MultiIndex {
public:
  MultiIndex() = default;

  explicit MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
    if (exponents_.empty()) throw InvalidArgument("multi-index needs at least one variable");
    for (int e : exponents_)
      if (e < 0) throw InvalidArgument("negative exponent in multi-index");
    degree_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
  }

  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(checked_dim(n), 0)); }

  static MultiIndex unit(int n, int i) {
    std::vector<int> e(checked_dim(n), 0);
    e.at(static_cast<std::size_t>(i)) = 1;
    return MultiIndex(std::move(e));
  }

  int dim() const noexcept { return static_cast<int>(exponents_.size()); }
  int degree() const noexcept { return degree_; }
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const noexcept { return exponents_; }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("adding multi-indices of different dimension");
    std::vector<int> e(a.exponents_);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += b.exponents_[i];
    return MultiIndex(std::move(e));
  }

  /// True when every entry of b is at most the matching entry of a.
  bool divisible_by(const MultiIndex& b) const {
    for (std::size_t i = 0; i < exponents_.size(); ++i)
      if (b.exponents_[i] > exponents_[i]) return false;
    return true;
  }

  friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("subtracting multi-indices of different dimension");
    if (!a.divisible_by(b)) throw InvalidArgument("multi-index difference would be negative");
    std::vector<int> e(a.exponents_);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] -= b.exponents_[i];
    return MultiIndex(std::move(e));
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.exponents_ == b.exponents_; }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(exponents_[i]);
    }
    return s + ")";
  }

private:
  static std::size_t checked_dim(int n) {
    if (n < 1) throw InvalidArgument("dimension must be at least 1");
    return static_cast<std::size_t>(n);
  }

  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Graded-lex order: total degree first, then larger leading exponents first,
/// so for n = 2 the basis reads 1, x, y, x^2, xy, y^2, ...
struct GradedLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(),
                                        a.exponents().begin(), a.exponents().end());
  }
};

/// s(t) = C(n+t, n), the number of monomials of degree at most t in n variables.
inline std::size_t basis_size(int n, int t) {
  if (n < 1) throw InvalidArgument("dimension must be at least 1");
  if (t < 0) return 0;
  std::size_t r = 1;
  for (int k = 1; k <= n; ++k) r = r * static_cast<std::size_t>(t + k) / static_cast<std::size_t>(k);
  return r;
}

inline std::size_t binomial(int top, int bottom) {
  if (bottom < 0 || top < 0 || bottom > top) return 0;
  std::size_t r = 1;
  for (int k = 1; k <= bottom; ++k)
    r = r * static_cast<std::size_t>(top - bottom + k) / static_cast<std::size_t>(k);
  return r;
}

/// ceil(deg/2).
inline int half_degree(int degree) { return degree <= 0 ? 0 : (degree + 1) / 2; }

namespace detail {
inline void fill_degree(int n, int remaining, std::size_t pos, std::vector<int>& cur,
                        std::vector<MultiIndex>& out) {
  if (pos + 1 == static_cast<std::size_t>(n)) {
    cur[pos] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    fill_degree(n, remaining - e, pos + 1, cur, out);
  }
}
}  // namespace detail

/// All alpha with |alpha| <= t in graded-lex order; the zero index comes first.
inline std::vector<MultiIndex> monomial_basis(int n, int t) {
  if (n < 1) throw InvalidArgument("dimension must be at least 1");
  if (t < 0) throw InvalidArgument("degree must be non-negative");
  std::vector<MultiIndex> out;
  out.reserve(basis_size(n, t));
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  for (int d = 0; d <= t; ++d) detail::fill_degree(n, d, 0, cur, out);
  return out;
}

/// Position lookup into monomial_basis(n, t).
class MonomialIndex {
public:
  MonomialIndex() = default;
  MonomialIndex(int n, int t) : n_(n), t_(t), basis_(monomial_basis(n, t)) {
    for (std::size_t i = 0; i < basis_.size(); ++i) position_.emplace(basis_[i], i);
  }

  int dim() const noexcept { return n_; }
  int max_degree() const noexcept { return t_; }
  std::size_t size() const noexcept { return basis_.size(); }
  const std::vector<MultiIndex>& basis() const noexcept { return basis_; }
  const MultiIndex& operator[](std::size_t i) const { return basis_[i]; }

  bool contains(const MultiIndex& a) const { return a.dim() == n_ && a.degree() <= t_; }

  std::size_t position(const MultiIndex& a) const {
    if (a.dim() != n_) throw DimensionMismatch("multi-index dimension " + std::to_string(a.dim()) +
                                               " does not match " + std::to_string(n_));
    auto it = position_.find(a);
    if (it == position_.end())
      throw DegreeOverflow("multi-index " + a.str() + " exceeds degree " + std::to_string(t_));
    return it->second;
  }

private:
  int n_ = 0;
  int t_ = -1;
  std::vector<MultiIndex> basis_;
  std::map<MultiIndex, std::size_t, GradedLex> position_;
};

}  // namespace pellsos
