#pragma once

// Exact s-ary expansions of rationals and lazily evaluated digit streams.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "digitstat/errors.hpp"
#include "digitstat/rational.hpp"

namespace digitstat {

using Digit = std::uint32_t;

/// Base of a positional expansion; digits are drawn from {0, ..., s-1}.
class Radix {
 public:
  static constexpr std::uint32_t kMax = 1U << 16;

  explicit Radix(std::uint32_t s) : s_(s) {
    if (s < 2) throw DomainError("radix must be >= 2, got " + std::to_string(s));
    if (s > kMax) throw DomainError("radix must be <= " + std::to_string(kMax));
  }

  [[nodiscard]] std::uint32_t value() const { return s_; }
  [[nodiscard]] bool contains(Digit d) const { return d < s_; }
  [[nodiscard]] Digit max_digit() const { return s_ - 1; }

  friend auto operator<=>(const Radix&, const Radix&) = default;

 private:
  std::uint32_t s_;
};

inline void check_digit(Radix radix, Digit d) {
  if (!radix.contains(d)) {
    throw DomainError("digit " + std::to_string(d) + " out of range for radix " +
                      std::to_string(radix.value()));
  }
}

/// Character for a digit: 0-9 then a-z (bases up to 36).
inline char digit_char(Digit d) {
  if (d < 10) return static_cast<char>('0' + d);
  if (d < 36) return static_cast<char>('a' + (d - 10));
  throw DomainError("digit " + std::to_string(d) + " has no single-character rendering");
}

inline std::optional<Digit> digit_from_char(char c) {
  if (c >= '0' && c <= '9') return static_cast<Digit>(c - '0');
  if (c >= 'a' && c <= 'z') return static_cast<Digit>(c - 'a' + 10);
  if (c >= 'A' && c <= 'Z') return static_cast<Digit>(c - 'A' + 10);
  return std::nullopt;
}

inline std::string digits_to_string(std::span<const Digit> digits) {
  std::string out;
  out.reserve(digits.size());
  for (Digit d : digits) out.push_back(digit_char(d));
  return out;
}

/// A deterministic, re-readable digit sequence. Each call to open() starts a
/// fresh single-consumer cursor at position 1; every cursor of the same
/// stream yields the identical sequence. Finite streams carry their length
/// and their cursors return nullopt once exhausted.
class DigitStream {
 public:
  using Cursor = std::function<std::optional<Digit>()>;
  using CursorFactory = std::function<Cursor()>;

  DigitStream(Radix radix, CursorFactory factory, std::optional<std::uint64_t> length = std::nullopt)
      : radix_(radix), factory_(std::move(factory)), length_(length) {}

  [[nodiscard]] Radix radix() const { return radix_; }
  [[nodiscard]] std::optional<std::uint64_t> length() const { return length_; }
  [[nodiscard]] bool finite() const { return length_.has_value(); }

  /// Cursor that rejects any digit outside the radix with a DomainError.
  [[nodiscard]] Cursor open() const {
    return [radix = radix_, inner = factory_()]() mutable -> std::optional<Digit> {
      auto d = inner();
      if (d) check_digit(radix, *d);
      return d;
    };
  }

  /// First n digits (fewer if the stream is finite and shorter).
  [[nodiscard]] std::vector<Digit> take(std::uint64_t n) const {
    std::vector<Digit> out;
    if (length_) n = std::min(n, *length_);
    out.reserve(static_cast<std::size_t>(n));
    auto cursor = open();
    for (std::uint64_t i = 0; i < n; ++i) {
      auto d = cursor();
      if (!d) break;
      out.push_back(*d);
    }
    return out;
  }

  static DigitStream from_digits(Radix radix, std::vector<Digit> digits) {
    for (Digit d : digits) check_digit(radix, d);
    auto shared = std::make_shared<const std::vector<Digit>>(std::move(digits));
    const auto n = static_cast<std::uint64_t>(shared->size());
    return DigitStream(
        radix,
        [shared]() -> Cursor {
          return [shared, i = std::size_t{0}]() mutable -> std::optional<Digit> {
            if (i >= shared->size()) return std::nullopt;
            return (*shared)[i++];
          };
        },
        n);
  }

  static DigitStream constant(Radix radix, Digit d) {
    check_digit(radix, d);
    return DigitStream(radix, [d]() -> Cursor { return [d]() -> std::optional<Digit> { return d; }; });
  }

  /// Infinite stream whose digit at 1-based position m is f(m).
  static DigitStream from_function(Radix radix, std::function<Digit(std::uint64_t)> f) {
    return DigitStream(radix, [f = std::move(f)]() -> Cursor {
      return [f, m = std::uint64_t{0}]() mutable -> std::optional<Digit> { return f(++m); };
    });
  }

 private:
  Radix radix_;
  CursorFactory factory_;
  std::optional<std::uint64_t> length_;
};

/// Emits `prefix` and then `tail` unchanged.
inline DigitStream with_prefix(std::vector<Digit> prefix, const DigitStream& tail) {
  for (Digit d : prefix) check_digit(tail.radix(), d);
  auto head = std::make_shared<const std::vector<Digit>>(std::move(prefix));
  std::optional<std::uint64_t> length;
  if (tail.length()) length = *tail.length() + head->size();
  return DigitStream(
      tail.radix(),
      [head, tail]() -> DigitStream::Cursor {
        return [head, i = std::size_t{0}, rest = tail.open()]() mutable -> std::optional<Digit> {
          if (i < head->size()) return (*head)[i++];
          return rest();
        };
      },
      length);
}

/// Eventually periodic expansion 0.<preperiod>(<period>) in base s.
///
/// Canonical form: the period is non-empty, primitive and never the single
/// digit s-1; the preperiod has no trailing digit that could be rotated into
/// the period. Terminating expansions always carry period (0).
class RadixExpansion {
 public:
  /// Validating constructor; throws DomainError on a non-canonical form.
  static RadixExpansion make(Radix radix, std::vector<Digit> preperiod, std::vector<Digit> period) {
    for (Digit d : preperiod) check_digit(radix, d);
    for (Digit d : period) check_digit(radix, d);
    if (period.empty()) throw DomainError("period must be non-empty; use period (0) for terminating expansions");
    if (period.size() == 1 && period.front() == radix.max_digit()) {
      throw DomainError("period (s-1) is not canonical; use the representation with period (0)");
    }
    const std::size_t len = period.size();
    for (std::size_t d = 1; d < len; ++d) {
      if (len % d != 0) continue;
      bool repeats = true;
      for (std::size_t i = d; i < len && repeats; ++i) repeats = period[i] == period[i - d];
      if (repeats) {
        throw DomainError("period is not primitive (repetition of a length-" + std::to_string(d) + " word)");
      }
    }
    if (!preperiod.empty() && preperiod.back() == period.back()) {
      throw DomainError("preperiod suffix can be absorbed into the period");
    }
    return RadixExpansion(radix, std::move(preperiod), std::move(period));
  }

  [[nodiscard]] Radix radix() const { return radix_; }
  [[nodiscard]] const std::vector<Digit>& preperiod() const { return preperiod_; }
  [[nodiscard]] const std::vector<Digit>& period() const { return period_; }
  [[nodiscard]] bool terminating() const { return period_.size() == 1 && period_.front() == 0; }

  /// Digit at 1-based position k.
  [[nodiscard]] Digit digit_at(std::uint64_t k) const {
    if (k == 0) throw DomainError("digit positions start at 1");
    if (k <= preperiod_.size()) return preperiod_[static_cast<std::size_t>(k - 1)];
    return period_[static_cast<std::size_t>((k - 1 - preperiod_.size()) % period_.size())];
  }

  [[nodiscard]] DigitStream stream() const {
    auto self = std::make_shared<const RadixExpansion>(*this);
    return DigitStream::from_function(radix_, [self](std::uint64_t k) { return self->digit_at(k); });
  }

  friend bool operator==(const RadixExpansion&, const RadixExpansion&) = default;

 private:
  RadixExpansion(Radix radix, std::vector<Digit> preperiod, std::vector<Digit> period)
      : radix_(radix), preperiod_(std::move(preperiod)), period_(std::move(period)) {}

  Radix radix_;
  std::vector<Digit> preperiod_;
  std::vector<Digit> period_;
};

/// Long division of p/q in base s with remainder-cycle detection.
/// Accepts 0 <= p/q < 1; the value 1 has no expansion of the form 0.xxx in
/// canonical form and is rejected.
inline RadixExpansion expand_rational(const BigInt& p, const BigInt& q, Radix radix) {
  if (q <= 0) throw DomainError("denominator must be >= 1");
  if (p < 0) throw DomainError("numerator must be >= 0");
  if (p >= q) throw DomainError("value " + p.str() + "/" + q.str() + " outside [0,1)");
  const Rational reduced(p, q);
  const BigInt den = denominator_of(reduced);
  BigInt rem = numerator_of(reduced);
  const BigInt s = radix.value();

  std::map<BigInt, std::size_t> seen;  // remainder -> position of the digit it produces
  std::vector<Digit> digits;
  while (true) {
    auto [it, inserted] = seen.emplace(rem, digits.size());
    if (!inserted) {
      const std::size_t start = it->second;
      std::vector<Digit> pre(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(start));
      std::vector<Digit> per(digits.begin() + static_cast<std::ptrdiff_t>(start), digits.end());
      return RadixExpansion::make(radix, std::move(pre), std::move(per));
    }
    rem *= s;
    digits.push_back(static_cast<Digit>(rem / den));
    rem %= den;
  }
}

inline RadixExpansion expand_rational(const Rational& value, Radix radix) {
  return expand_rational(numerator_of(value), denominator_of(value), radix);
}

/// Exact value: preperiod sum plus the geometric sum of the period.
inline Rational evaluate_expansion(const RadixExpansion& e) {
  const BigInt s = e.radix().value();
  BigInt pre = 0;
  for (Digit d : e.preperiod()) pre = pre * s + d;
  BigInt per = 0;
  for (Digit d : e.period()) per = per * s + d;
  const BigInt pre_scale = pow_big(e.radix().value(), e.preperiod().size());
  const BigInt cycle = pow_big(e.radix().value(), e.period().size()) - 1;
  return Rational(pre * cycle + per, pre_scale * cycle);
}

/// Renders `0.<preperiod>(<period>)_s`, e.g. `0.2(1)_3`.
inline std::string to_string(const RadixExpansion& e) {
  return "0." + digits_to_string(e.preperiod()) + "(" + digits_to_string(e.period()) + ")_" +
         std::to_string(e.radix().value());
}

/// Inverse of to_string; rejects non-canonical expansions.
inline RadixExpansion parse_expansion(std::string_view text) {
  auto fail = [&](const char* why) -> RadixExpansion {
    throw DomainError("malformed expansion '" + std::string(text) + "': " + why);
  };
  if (text.substr(0, 2) != "0.") return fail("must start with '0.'");
  const auto open = text.find('(');
  const auto close = text.find(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return fail("missing (period)");
  }
  if (text.substr(close + 1, 1) != "_") return fail("missing _base suffix");
  const auto base_text = text.substr(close + 2);
  if (!detail::all_digits(base_text) || base_text.size() > 6) return fail("bad base");
  const Radix radix(static_cast<std::uint32_t>(std::stoul(std::string(base_text))));

  auto read = [&](std::string_view chars) {
    std::vector<Digit> out;
    for (char c : chars) {
      auto d = digit_from_char(c);
      if (!d) fail("bad digit character");
      check_digit(radix, *d);
      out.push_back(*d);
    }
    return out;
  };
  return RadixExpansion::make(radix, read(text.substr(2, open - 2)), read(text.substr(open + 1, close - open - 1)));
}

}  // namespace digitstat
