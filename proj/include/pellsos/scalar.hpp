#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <type_traits>

#include "pellsos/errors.hpp"

namespace pellsos {

/// Exact arbitrary-precision rational scalar.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

template <class S>
inline constexpr bool is_exact_v = !std::is_floating_point_v<S>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.template convert_to<double>(); }

/// One-way conversion out of the exact backend.
template <class S>
S from_rational(const Rational& r) {
  if constexpr (std::is_same_v<S, Rational>) {
    return r;
  } else {
    return static_cast<S>(to_double(r));
  }
}

template <class S>
bool is_zero(const S& x) {
  return x == S(0);
}

/// Parses "3", "-2/7", "0.125", "1e-3", "+2.5E2" exactly.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw ParseError("invalid number literal '" + std::string(text) + "'");
  };
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) return fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + s + "'");
    return num / den;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  BigInt digits = 0;
  int scale = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      any_digit = true;
      if (seen_point) --scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return fail();
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') return fail();
    ++pos;
    bool exp_negative = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) exp_negative = s[pos++] == '-';
    if (pos == s.size()) return fail();
    int exponent = 0;
    for (; pos < s.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(s[pos]))) return fail();
      exponent = exponent * 10 + (s[pos] - '0');
      if (exponent > 4000) return fail();
    }
    scale += exp_negative ? -exponent : exponent;
  }
  Rational value(digits);
  BigInt ten_power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(scale)));
  if (scale >= 0)
    value *= Rational(ten_power);
  else
    value /= Rational(ten_power);
  return negative ? Rational(-value) : value;
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_scalar(double x) { return format_double(x); }

inline std::string format_scalar(const Rational& x) {
  std::string out = boost::multiprecision::numerator(x).str();
  BigInt den = boost::multiprecision::denominator(x);
  if (den != 1) out += "/" + den.str();
  return out;
}

}  // namespace pellsos
