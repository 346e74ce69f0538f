#pragma once

#include <gtest/gtest.h>

#include <initializer_list>
#include <string>
#include <vector>

#include "pellsos/pellsos.hpp"

namespace pellsos::testing {

inline MultiIndex mi(std::initializer_list<int> e) { return MultiIndex(std::vector<int>(e)); }
inline Rational q(const std::string& s) { return parse_rational(s); }

// 1-D or 2-D polynomial from (exponents, coefficient) pairs.
inline Poly<Rational> poly(int n, std::initializer_list<std::pair<std::vector<int>, const char*>> terms) {
  Poly<Rational> p(n);
  for (const auto& [e, c] : terms) p.add_term(MultiIndex(e), parse_rational(c));
  return p;
}

template <class S>
double max_abs_diff(const Poly<S>& a, const Poly<S>& b) {
  return (a - b).max_abs_coeff();
}

}  // namespace pellsos::testing
