#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pellsos/scalar.hpp"

namespace pellsos {

/// Small row-major dense matrix usable with both scalar backends.
template <class S>
class Dense {
public:
  Dense() = default;
  Dense(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}

  static Dense identity(std::size_t n) {
    Dense m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  friend bool operator==(const Dense& a, const Dense& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  template <class T>
  Dense<T> cast() const {
    Dense<T> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = from_rational_or_same<T>((*this)(i, j));
    return out;
  }

private:
  template <class T>
  static T from_rational_or_same(const S& v) {
    if constexpr (std::is_same_v<S, T>)
      return v;
    else if constexpr (std::is_same_v<S, Rational>)
      return from_rational<T>(v);
    else
      return T(v);
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

inline Eigen::MatrixXd to_eigen(const Dense<double>& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return out;
}

inline Dense<double> from_eigen(const Eigen::MatrixXd& m) {
  Dense<double> out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out(i, j) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

/// M = L D L^T with L unit lower triangular. This is Cholesky without the
/// square roots, so it also runs over the rationals.
template <class S>
struct LdlFactor {
  Dense<S> lower;
  std::vector<S> diag;
};

/// Relative pivot floor for the binary64 backend.
inline constexpr double kPivotFloor = 1e-12;

template <class S>
LdlFactor<S> ldl_factor(const Dense<S>& m, const std::string& label = "M") {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw DimensionMismatch("LDL factorization of a non-square matrix");
  LdlFactor<S> f{Dense<S>::identity(n), std::vector<S>(n, S(0))};
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(to_double(m(i, i))));
  for (std::size_t j = 0; j < n; ++j) {
    S d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= f.lower(j, k) * f.lower(j, k) * f.diag[k];
    bool bad;
    if constexpr (is_exact_v<S>)
      bad = !(d > 0);
    else
      bad = !(d > kPivotFloor * scale) || !std::isfinite(d);
    if (bad) throw NotPositiveDefinite(label, j, to_double(d));
    f.diag[j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      S v = m(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= f.lower(i, k) * f.lower(j, k) * f.diag[k];
      f.lower(i, j) = v / d;
    }
  }
  return f;
}

/// Inverse of a unit lower triangular matrix.
template <class S>
Dense<S> unit_lower_inverse(const Dense<S>& l) {
  const std::size_t n = l.rows();
  Dense<S> inv = Dense<S>::identity(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) {
      S v(0);
      for (std::size_t k = j; k < i; ++k) v -= l(i, k) * inv(k, j);
      inv(i, j) = v;
    }
  return inv;
}

/// M^{-1} = L^{-T} D^{-1} L^{-1} for a positive definite M.
template <class S>
Dense<S> spd_inverse(const Dense<S>& m, const std::string& label = "M") {
  const LdlFactor<S> f = ldl_factor(m, label);
  const Dense<S> li = unit_lower_inverse(f.lower);
  const std::size_t n = m.rows();
  Dense<S> out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      S v(0);
      for (std::size_t k = i; k < n; ++k) v += li(k, i) * li(k, j) / f.diag[k];
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

}  // namespace pellsos
