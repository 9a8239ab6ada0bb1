#pragma once

// Exact arithmetic helpers. Every parameter and statistic in the library is an
// exact fraction of unbounded integers; floors are integer divisions.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "digitstat/errors.hpp"

namespace digitstat {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

/// Floor of num/den for den > 0 (rounds toward negative infinity).
inline BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;
  if (num % den != 0 && num < 0) --q;
  return q;
}

inline BigInt floor_of(const Rational& r) { return floor_div(numerator_of(r), denominator_of(r)); }

inline Rational make_rational(const BigInt& p, const BigInt& q) {
  if (q == 0) throw DomainError("zero denominator");
  return Rational(p, q);
}

inline BigInt pow_big(std::uint64_t base, std::size_t exp) {
  BigInt result = 1;
  BigInt b = base;
  while (exp > 0) {
    if (exp & 1U) result *= b;
    b *= b;
    exp >>= 1U;
  }
  return result;
}

/// Canonical fraction rendering, always `p/q` (integers print as `p/1`).
inline std::string to_fraction_string(const Rational& r) {
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

/// Decimal rendering with a fixed number of significant digits, rounded half
/// away from zero. Zero renders as "0".
inline std::string to_decimal_string(const Rational& value, int significant = 20) {
  if (significant < 1) throw DomainError("significant digits must be >= 1");
  if (value == 0) return "0";
  const bool negative = value < 0;
  const BigInt num = boost::multiprecision::abs(numerator_of(value));
  const BigInt den = denominator_of(value);

  // exponent e with 10^e <= |value| < 10^(e+1)
  long exponent = static_cast<long>(num.str().size()) - static_cast<long>(den.str().size());
  auto ge_pow10 = [&](long e) {
    return e >= 0 ? num >= den * pow_big(10, static_cast<std::size_t>(e))
                  : num * pow_big(10, static_cast<std::size_t>(-e)) >= den;
  };
  while (!ge_pow10(exponent)) --exponent;
  while (ge_pow10(exponent + 1)) ++exponent;

  const long shift = significant - 1 - exponent;
  BigInt scaled_num = num;
  BigInt scaled_den = den;
  if (shift >= 0) {
    scaled_num *= pow_big(10, static_cast<std::size_t>(shift));
  } else {
    scaled_den *= pow_big(10, static_cast<std::size_t>(-shift));
  }
  BigInt digits = (2 * scaled_num + scaled_den) / (2 * scaled_den);
  if (digits == pow_big(10, static_cast<std::size_t>(significant))) {
    digits /= 10;
    ++exponent;
  }
  std::string d = digits.str();

  std::string out = negative ? "-" : "";
  if (exponent >= 0) {
    const auto int_len = static_cast<std::size_t>(exponent + 1);
    if (int_len >= d.size()) {
      out += d + std::string(int_len - d.size(), '0');
    } else {
      out += d.substr(0, int_len) + "." + d.substr(int_len);
    }
  } else {
    out += "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + d;
  }
  return out;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

/// Base-10 digits to an integer. The BigInt string constructor reads a
/// leading 0 as an octal prefix, so leading zeros are stripped first.
inline BigInt decimal_integer(std::string_view digits) {
  while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
  return BigInt(std::string(digits));
}

}  // namespace detail

/// Parses `p/q`, an integer, or a finite decimal literal such as `0.2` or
/// `-1.25` into an exact fraction. Exponent notation is rejected.
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw DomainError("malformed rational: empty");

  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  auto fail = [&]() -> Rational { throw DomainError("malformed rational: '" + std::string(text) + "'"); };

  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto p = s.substr(0, slash);
    auto q = s.substr(slash + 1);
    if (!detail::all_digits(p) || !detail::all_digits(q)) return fail();
    const BigInt qq = detail::decimal_integer(q);
    if (qq == 0) throw DomainError("malformed rational: zero denominator in '" + std::string(text) + "'");
    result = Rational(detail::decimal_integer(p), qq);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto ip = s.substr(0, dot);
    auto fp = s.substr(dot + 1);
    if (ip.empty() && fp.empty()) return fail();
    if (!ip.empty() && !detail::all_digits(ip)) return fail();
    if (!fp.empty() && !detail::all_digits(fp)) return fail();
    const BigInt whole = ip.empty() ? BigInt(0) : detail::decimal_integer(ip);
    const BigInt frac = fp.empty() ? BigInt(0) : detail::decimal_integer(fp);
    const BigInt scale = pow_big(10, fp.size());
    result = Rational(whole * scale + frac, scale);
  } else {
    if (!detail::all_digits(s)) return fail();
    result = Rational(detail::decimal_integer(s));
  }
  return negative ? Rational(-result) : result;
}

}  // namespace digitstat
