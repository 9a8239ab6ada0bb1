#pragma once

// Generators of digit sequences with prescribed statistics: Beatty-indicator
// and quota constructions of prescribed frequencies, floor-weighted averages,
// the two-level oscillating schedule, the block construction of a ternary
// number with a digit mean but no digit frequencies, and the 0^(2^m) 1^(2^m)
// number without a digit mean.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "digitstat/digit_core.hpp"
#include "digitstat/errors.hpp"
#include "digitstat/rational.hpp"
#include "digitstat/stats.hpp"

namespace digitstat {

inline const Radix kTernary{3};

// ---------------------------------------------------------------------------
// Beatty indicators

/// d_n = [(n+1) a] - [n a] for a in [0,1]; always 0 or 1.
inline unsigned beatty_indicator(const Rational& a, std::uint64_t n) {
  if (a < 0 || a > 1) throw DomainError("beatty indicator needs a in [0,1], got " + to_fraction_string(a));
  if (n < 1) throw DomainError("beatty indicator index starts at 1");
  const BigInt p = numerator_of(a);
  const BigInt q = denominator_of(a);
  const BigInt d = (BigInt(n + 1) * p) / q - (BigInt(n) * p) / q;
  return static_cast<unsigned>(d);
}

namespace detail {

/// Incremental d_1, d_2, ... for a = p/q: with rem = (k p) mod q the k-th
/// indicator is [(rem + p) / q].
class BeattyCounter {
 public:
  explicit BeattyCounter(const Rational& a)
      : p_(numerator_of(a)), q_(denominator_of(a)), rem_(numerator_of(a) % denominator_of(a)) {}

  unsigned next() {
    rem_ += p_;
    const bool fired = rem_ >= q_;
    if (fired) rem_ -= q_;
    return fired ? 1U : 0U;
  }

 private:
  BigInt p_;
  BigInt q_;
  BigInt rem_;
};

inline void check_section3_params(const Rational& a, const Rational& b) {
  if (a < 0 || b < 0) throw DomainError("a and b must be non-negative");
  if (a + b > 1) {
    throw DomainError("a + b must be <= 1, got " + to_fraction_string(a) + " + " + to_fraction_string(b));
  }
}

}  // namespace detail

/// Ternary stream of the Beatty construction: digit m is 0 when d_m(a) = 1,
/// otherwise 1 when d_m(b) = 0 and 2 when d_m(b) = 1. The zero count tracks
/// [ (m+1) a ] exactly; the counts of 1 and 2 are not controlled when the two
/// indicators fire together.
inline DigitStream beatty_section3_stream(const Rational& a, const Rational& b) {
  detail::check_section3_params(a, b);
  return DigitStream(kTernary, [a, b]() -> DigitStream::Cursor {
    return [zeros = detail::BeattyCounter(a), ones = detail::BeattyCounter(b)]() mutable -> std::optional<Digit> {
      const unsigned d = zeros.next();
      const unsigned d_prime = ones.next();
      if (d == 1) return Digit{0};
      return d_prime == 0 ? Digit{1} : Digit{2};
    };
  });
}

inline std::vector<Digit> beatty_construct_section3(const Rational& a, const Rational& b, std::uint64_t n) {
  return beatty_section3_stream(a, b).take(n);
}

// ---------------------------------------------------------------------------
// Quota scheduler

/// Greedy quota stream: at step m emit the digit i with the largest deficit
/// m tau_i - N_i(m-1), smallest digit on ties. Every prefix keeps
/// |N_i - m tau_i| <= 2.
inline DigitStream quota_stream(const FrequencyProfile& f) {
  // Work on integer weights tau_i = w_i / D so deficits stay integral.
  BigInt common = 1;
  for (const auto& t : f.tau()) common = boost::multiprecision::lcm(common, denominator_of(t));
  std::vector<BigInt> weights;
  for (const auto& t : f.tau()) weights.push_back(numerator_of(t) * (common / denominator_of(t)));

  return DigitStream(f.radix(), [weights, common]() -> DigitStream::Cursor {
    // deficit_i * D = m w_i - N_i D, maintained incrementally
    return [weights, common, scaled = std::vector<BigInt>(weights.size(), BigInt(0))]() mutable
           -> std::optional<Digit> {
      std::size_t best = 0;
      for (std::size_t i = 0; i < scaled.size(); ++i) {
        scaled[i] += weights[i];
        if (scaled[i] > scaled[best]) best = i;
      }
      scaled[best] -= common;
      return static_cast<Digit>(best);
    };
  });
}

inline std::vector<Digit> quota_construct(const FrequencyProfile& f, std::uint64_t n) { return quota_stream(f).take(n); }

// ---------------------------------------------------------------------------
// Floor-weighted averages

/// sum_{i=0}^{n-1} [(a i + b) / m] for a, b >= 0 and m >= 1, by the
/// Euclid-like reduction (logarithmic in the arguments).
inline BigInt floor_sum(BigInt n, BigInt m, BigInt a, BigInt b) {
  BigInt total = 0;
  while (true) {
    if (a >= m) {
      total += (n - 1) * n / 2 * (a / m);
      a %= m;
    }
    if (b >= m) {
      total += n * (b / m);
      b %= m;
    }
    const BigInt y_max = a * n + b;
    if (y_max < m) break;
    n = y_max / m;
    b = y_max % m;
    std::swap(m, a);
  }
  return total;
}

/// ([k x] + [(k+1) x] + ... + [n x]) / (n (n+1) / 2), exactly.
inline Rational floor_weighted_average(const Rational& x, std::uint64_t k, std::uint64_t n) {
  if (x < 0) throw DomainError("x must be >= 0");
  if (k < 1) throw DomainError("k must be >= 1");
  if (k > n) throw DomainError("k must not exceed n (k = " + std::to_string(k) + ", n = " + std::to_string(n) + ")");
  const BigInt p = numerator_of(x);
  const BigInt q = denominator_of(x);
  const BigInt sum = floor_sum(BigInt(n - k + 1), q, p, BigInt(k) * p);
  return Rational(2 * sum, BigInt(n) * BigInt(n + 1));
}

struct FloorAverageBounds {
  Rational lower;  // strict: W > lower
  Rational upper;  // W <= upper
};

/// Sandwich from y - 1 < [y] <= y applied to every term:
/// upper = x (1 - (k-1)k / (n(n+1))), lower = upper - 2 (n-k+1) / (n(n+1)).
inline FloorAverageBounds floor_average_bounds(const Rational& x, std::uint64_t k, std::uint64_t n) {
  if (k < 1 || k > n) throw DomainError("need 1 <= k <= n");
  const BigInt nn = BigInt(n) * BigInt(n + 1);
  const Rational upper = x * (1 - Rational(BigInt(k - 1) * BigInt(k), nn));
  const Rational lower = upper - Rational(2 * BigInt(n - k + 1), nn);
  return {lower, upper};
}

// ---------------------------------------------------------------------------
// Oscillating schedule

/// Sequence alpha_1, alpha_2, ... taking values x1 and x2 in alternating runs
/// (x1 first). Run j ends at the least n_j where the floor-weighted average
///   w_n = ([1 alpha_1] + ... + [n alpha_n]) / (n (n+1) / 2)
/// drops below x1 + eps (x1-runs) or rises above x2 - eps (x2-runs).
class OscillationSchedule {
 public:
  [[nodiscard]] const Rational& x1() const { return x1_; }
  [[nodiscard]] const Rational& x2() const { return x2_; }
  [[nodiscard]] const Rational& epsilon() const { return eps_; }
  [[nodiscard]] std::uint64_t horizon() const { return horizon_; }

  /// Completed run ends n_1 < n_2 < ... up to the horizon.
  [[nodiscard]] const std::vector<std::uint64_t>& breakpoints() const { return breakpoints_; }
  /// w at each breakpoint.
  [[nodiscard]] const std::vector<Rational>& breakpoint_w() const { return breakpoint_w_; }

  /// alpha_n for 1 <= n <= horizon.
  [[nodiscard]] const Rational& value(std::uint64_t n) const {
    if (n < 1 || n > horizon_) throw DomainError("schedule index outside [1, horizon]");
    const auto run = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), n) - breakpoints_.begin();
    return run % 2 == 0 ? x1_ : x2_;
  }

  /// w_n, recomputed from the values.
  [[nodiscard]] Rational w(std::uint64_t n) const {
    BigInt sum = 0;
    for (std::uint64_t j = 1; j <= n; ++j) sum += floor_of(BigInt(j) * value(j));
    return Rational(2 * sum, BigInt(n) * BigInt(n + 1));
  }

  friend OscillationSchedule build_oscillating_schedule(const Rational& x1, const Rational& x2, const Rational& epsilon,
                                                        std::uint64_t horizon);

 private:
  OscillationSchedule(Rational x1, Rational x2, Rational eps, std::uint64_t horizon)
      : x1_(std::move(x1)), x2_(std::move(x2)), eps_(std::move(eps)), horizon_(horizon) {}

  Rational x1_;
  Rational x2_;
  Rational eps_;
  std::uint64_t horizon_;
  std::vector<std::uint64_t> breakpoints_;
  std::vector<Rational> breakpoint_w_;
};

inline OscillationSchedule build_oscillating_schedule(const Rational& x1, const Rational& x2, const Rational& epsilon,
                                                      std::uint64_t horizon) {
  if (x1 <= 0) throw DomainError("schedule needs x1 > 0");
  if (x2 <= x1) throw DomainError("schedule needs x1 < x2");
  if (epsilon <= 0) throw DomainError("schedule needs epsilon > 0");
  if (2 * epsilon >= x2 - x1) throw DomainError("schedule needs epsilon < (x2 - x1)/2");
  if (horizon < 1) throw DomainError("schedule horizon must be >= 1");

  OscillationSchedule sched(x1, x2, epsilon, horizon);
  const Rational low_target = x1 + epsilon;
  const Rational high_target = x2 - epsilon;
  // w_n < p/q  <=>  2 S q < p n (n+1)
  const BigInt lp = numerator_of(low_target), lq = denominator_of(low_target);
  const BigInt hp = numerator_of(high_target), hq = denominator_of(high_target);
  const BigInt p1 = numerator_of(x1), q1 = denominator_of(x1);
  const BigInt p2 = numerator_of(x2), q2 = denominator_of(x2);

  BigInt sum = 0;
  bool low_run = true;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    const BigInt bn(n);
    sum += low_run ? (bn * p1) / q1 : (bn * p2) / q2;
    const BigInt tri = bn * BigInt(n + 1);
    const bool done = low_run ? 2 * sum * lq < lp * tri : 2 * sum * hq > hp * tri;
    if (done) {
      sched.breakpoints_.push_back(n);
      sched.breakpoint_w_.emplace_back(2 * sum, tri);
      low_run = !low_run;
    }
  }
  return sched;
}

// ---------------------------------------------------------------------------
// Block construction of a mean without frequencies

struct BlockRow {
  std::uint64_t k = 0;
  Rational alpha;
  Rational beta;   // 2 - 2 alpha - theta
  Rational gamma;  // alpha - 1 + theta
  std::uint64_t zeros = 0;  // [k alpha]
  std::uint64_t ones = 0;   // [k beta]
  std::uint64_t twos = 0;   // [k gamma]

  [[nodiscard]] std::uint64_t length() const { return zeros + ones + twos; }
  [[nodiscard]] std::uint64_t digit_sum() const { return ones + 2 * twos; }
};

/// Matrix of per-block run lengths of the digits 0, 1, 2.
struct BlockSpec {
  Rational theta;
  std::vector<BlockRow> rows;

  [[nodiscard]] std::uint64_t total_length() const {
    std::uint64_t t = 0;
    for (const auto& r : rows) t += r.length();
    return t;
  }

  /// Depth at the end of each block (cumulative lengths).
  [[nodiscard]] std::vector<std::uint64_t> block_end_depths() const {
    std::vector<std::uint64_t> out;
    out.reserve(rows.size());
    std::uint64_t t = 0;
    for (const auto& r : rows) out.push_back(t += r.length());
    return out;
  }
};

inline BlockRow make_block_row(std::uint64_t k, const Rational& alpha, const Rational& theta) {
  BlockRow row;
  row.k = k;
  row.alpha = alpha;
  row.beta = 2 - 2 * alpha - theta;
  row.gamma = alpha - 1 + theta;
  const Rational kk(BigInt{k});
  row.zeros = static_cast<std::uint64_t>(floor_of(kk * row.alpha));
  row.ones = static_cast<std::uint64_t>(floor_of(kk * row.beta));
  row.twos = static_cast<std::uint64_t>(floor_of(kk * row.gamma));
  return row;
}

/// Lazily emits blocks 1..K: zeros, then ones, then twos in each block.
inline DigitStream block_stream(std::shared_ptr<const BlockSpec> spec) {
  const std::uint64_t total = spec->total_length();
  return DigitStream(
      kTernary,
      [spec]() -> DigitStream::Cursor {
        return [spec, block = std::size_t{0}, pos = std::uint64_t{0}]() mutable -> std::optional<Digit> {
          while (block < spec->rows.size() && pos >= spec->rows[block].length()) {
            ++block;
            pos = 0;
          }
          if (block >= spec->rows.size()) return std::nullopt;
          const auto& row = spec->rows[block];
          const std::uint64_t at = pos++;
          if (at < row.zeros) return Digit{0};
          if (at < row.zeros + row.ones) return Digit{1};
          return Digit{2};
        };
      },
      total);
}

struct MeanWithoutFrequency {
  std::shared_ptr<const BlockSpec> blocks;
  OscillationSchedule schedule;
  DigitStream stream;
};

/// Admissible window for x1, x2 given theta: (max(0, 1 - theta), (2 - theta)/2).
inline std::pair<Rational, Rational> admissible_x_window(const Rational& theta) {
  Rational lower = 1 - theta;
  if (lower < 0) lower = 0;
  return {lower, Rational((2 - theta) / 2)};
}

/// Ternary number whose digit mean tends to theta while the frequency of 0
/// follows the oscillating floor-weighted average of the schedule (x1, x2,
/// epsilon) and therefore has no limit. Blocks 1..K.
inline MeanWithoutFrequency construct_mean_without_frequency(const Rational& theta, const Rational& x1,
                                                             const Rational& x2, const Rational& epsilon,
                                                             std::uint64_t blocks) {
  if (theta < 0 || theta > 2) throw DomainError("theta must lie in [0,2], got " + to_fraction_string(theta));
  if (theta == 0 || theta == 2) {
    throw InfeasibleError("theta = " + to_fraction_string(theta) +
                          ": a digit mean of 0 or 2 forces all digit frequencies to exist; theta must lie in (0,2)");
  }
  const auto [lower, upper] = admissible_x_window(theta);
  for (const Rational* x : {&x1, &x2}) {
    if (*x <= lower || *x >= upper) {
      throw DomainError("x = " + to_fraction_string(*x) + " outside the admissible window (" +
                        to_fraction_string(lower) + ", " + to_fraction_string(upper) + ") for theta = " +
                        to_fraction_string(theta));
    }
  }
  if (blocks < 1) throw DomainError("need at least one block");
  auto schedule = build_oscillating_schedule(x1, x2, epsilon, blocks);

  auto spec = std::make_shared<BlockSpec>();
  spec->theta = theta;
  spec->rows.reserve(blocks);
  for (std::uint64_t k = 1; k <= blocks; ++k) spec->rows.push_back(make_block_row(k, schedule.value(k), theta));
  std::shared_ptr<const BlockSpec> frozen = std::move(spec);
  return MeanWithoutFrequency{frozen, std::move(schedule), block_stream(frozen)};
}

/// A_k (digit sum) and B_k (length) over the blocks before k.
struct BlockPrefixSums {
  std::uint64_t k = 0;
  BigInt digit_sum;
  BigInt length;
};

inline std::vector<BlockPrefixSums> block_prefix_sums(const BlockSpec& spec) {
  std::vector<BlockPrefixSums> out;
  out.reserve(spec.rows.size());
  BigInt a = 0;
  BigInt b = 0;
  for (const auto& row : spec.rows) {
    out.push_back({row.k, a, b});
    a += row.digit_sum();
    b += row.length();
  }
  return out;
}

/// First block k where the zero runs of two constructions differ.
inline std::optional<std::uint64_t> first_differing_zero_run(const BlockSpec& a, const BlockSpec& b) {
  const std::size_t n = std::min(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.rows[i].zeros != b.rows[i].zeros) return a.rows[i].k;
  }
  return std::nullopt;
}

/// CSV rows `k,a_k1,a_k2,a_k3,alpha_k`.
inline void write_blockspec_csv(std::ostream& os, const BlockSpec& spec) {
  os << "k,a_k1,a_k2,a_k3,alpha_k\n";
  for (const auto& row : spec.rows) {
    os << row.k << ',' << row.zeros << ',' << row.ones << ',' << row.twos << ',' << to_fraction_string(row.alpha)
       << '\n';
  }
}

// ---------------------------------------------------------------------------
// Number without a digit mean: runs 0^(2^m) 1^(2^m), m = 0, 1, 2, ...

inline DigitStream no_mean_stream(Radix radix = kTernary) {
  return DigitStream(radix, []() -> DigitStream::Cursor {
    return [run = std::uint64_t{1}, pos = std::uint64_t{0}]() mutable -> std::optional<Digit> {
      // one period is 2*run digits: run zeros then run ones
      if (pos == 2 * run) {
        run *= 2;
        pos = 0;
      }
      return pos++ < run ? Digit{0} : Digit{1};
    };
  });
}

inline std::vector<Digit> no_mean_example(std::uint64_t n, Radix radix = kTernary) {
  return no_mean_stream(radix).take(n);
}

/// Depth at the end of the 0-run of length 2^m.
inline std::uint64_t no_mean_zero_run_end(unsigned m) { return 3 * (std::uint64_t{1} << m) - 2; }
/// Depth at the end of the 1-run of length 2^m.
inline std::uint64_t no_mean_one_run_end(unsigned m) { return (std::uint64_t{1} << (m + 2)) - 2; }

}  // namespace digitstat
