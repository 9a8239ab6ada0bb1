#pragma once

// Running digit statistics, the frequency/mean algebra and finite-depth
// convergence diagnostics.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "digitstat/digit_core.hpp"
#include "digitstat/errors.hpp"
#include "digitstat/rational.hpp"

namespace digitstat {

/// Statistics of the first n digits: counts N_i, relative frequencies
/// v_i = N_i/n and the relative mean r_n = (1/n) * sum of the digits.
struct PartialStats {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> counts;
  std::vector<Rational> freqs;
  Rational mean;

  /// `digit_sum` is the plain sum of the first n digits, kept separately from
  /// the counts so that the mean is not derived from the frequencies.
  static PartialStats from_counts(std::vector<std::uint64_t> counts, const BigInt& digit_sum) {
    PartialStats st;
    for (auto c : counts) st.n += c;
    if (st.n == 0) throw DomainError("statistics need at least one digit");
    st.freqs.reserve(counts.size());
    for (auto c : counts) st.freqs.emplace_back(BigInt(c), BigInt(st.n));
    st.counts = std::move(counts);
    st.mean = Rational(digit_sum, BigInt(st.n));
    return st;
  }

  [[nodiscard]] std::size_t radix() const { return counts.size(); }

  friend bool operator==(const PartialStats&, const PartialStats&) = default;
};

struct RunningStats {
  std::vector<PartialStats> rows;
  /// The stream ended before the last checkpoint. The final row then holds
  /// the statistics at the actual stream length.
  bool truncated = false;
  std::uint64_t consumed = 0;
};

namespace detail {

inline void check_checkpoints(std::span<const std::uint64_t> checkpoints) {
  if (checkpoints.empty()) throw DomainError("checkpoint list is empty");
  if (checkpoints.front() < 1) throw DomainError("checkpoints must be >= 1");
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (checkpoints[i] <= checkpoints[i - 1]) throw DomainError("checkpoints must be strictly ascending");
  }
}

}  // namespace detail

/// Single pass over `stream`, emitting one PartialStats per checkpoint depth.
inline RunningStats running_stats(const DigitStream& stream, std::span<const std::uint64_t> checkpoints) {
  detail::check_checkpoints(checkpoints);
  const std::uint32_t s = stream.radix().value();
  std::vector<std::uint64_t> counts(s, 0);
  std::uint64_t digit_sum = 0;  // <= (2^16 - 1) * n, far from overflow for any feasible depth
  std::uint64_t n = 0;

  RunningStats out;
  out.rows.reserve(checkpoints.size());
  auto cursor = stream.open();
  for (std::uint64_t target : checkpoints) {
    while (n < target) {
      auto d = cursor();
      if (!d) break;
      ++counts[*d];
      digit_sum += *d;
      ++n;
    }
    if (n < target) {
      out.truncated = true;
      if (n > 0 && (out.rows.empty() || out.rows.back().n != n)) {
        out.rows.push_back(PartialStats::from_counts(counts, BigInt(digit_sum)));
      }
      break;
    }
    out.rows.push_back(PartialStats::from_counts(counts, BigInt(digit_sum)));
  }
  out.consumed = n;
  return out;
}

/// start, start*factor, start*factor^2, ... up to `max`, merged with `extra`
/// (block boundaries, breakpoints) and deduplicated.
inline std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t start, std::uint64_t factor, std::uint64_t max,
                                                        std::span<const std::uint64_t> extra = {}) {
  if (start < 1) throw DomainError("geometric checkpoints: start must be >= 1");
  if (factor < 2) throw DomainError("geometric checkpoints: factor must be >= 2");
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = start; n <= max; n *= factor) {
    out.push_back(n);
    if (n > max / factor) break;
  }
  for (auto e : extra) {
    if (e >= 1 && e <= max) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

inline Rational weighted_digit_sum(std::span<const Rational> tau) {
  Rational theta = 0;
  for (std::size_t i = 1; i < tau.size(); ++i) theta += Rational(BigInt(i)) * tau[i];
  return theta;
}

}  // namespace detail

/// Target or limit digit frequencies (tau_0, ..., tau_{s-1}).
class FrequencyProfile {
 public:
  static FrequencyProfile make(Radix radix, std::vector<Rational> tau) {
    if (tau.size() != radix.value()) {
      throw DomainError("frequency profile needs " + std::to_string(radix.value()) + " entries, got " +
                        std::to_string(tau.size()));
    }
    Rational total = 0;
    for (const auto& t : tau) {
      if (t < 0) throw DomainError("frequencies must be non-negative");
      total += t;
    }
    if (total != 1) throw DomainError("frequencies must sum to 1, got " + to_fraction_string(total));
    return FrequencyProfile(radix, std::move(tau));
  }

  [[nodiscard]] Radix radix() const { return radix_; }
  [[nodiscard]] const std::vector<Rational>& tau() const { return tau_; }
  [[nodiscard]] Rational theta() const { return detail::weighted_digit_sum(tau_); }

  friend bool operator==(const FrequencyProfile&, const FrequencyProfile&) = default;

 private:
  FrequencyProfile(Radix radix, std::vector<Rational> tau) : radix_(radix), tau_(std::move(tau)) {}

  Radix radix_;
  std::vector<Rational> tau_;
};

/// theta = tau_1 + 2 tau_2 + ... + (s-1) tau_{s-1}.
inline Rational mean_from_frequencies(const FrequencyProfile& f) { return detail::weighted_digit_sum(f.tau()); }

/// Digit frequencies of a rational: only the period contributes.
inline FrequencyProfile exact_frequencies_rational(const RadixExpansion& e) {
  const auto& period = e.period();
  std::vector<std::uint64_t> counts(e.radix().value(), 0);
  for (Digit d : period) ++counts[d];
  std::vector<Rational> tau;
  tau.reserve(counts.size());
  for (auto c : counts) tau.emplace_back(BigInt(c), BigInt(period.size()));
  return FrequencyProfile::make(e.radix(), std::move(tau));
}

struct TernarySolution {
  Rational v1;
  Rational v2;

  friend bool operator==(const TernarySolution&, const TernarySolution&) = default;
};

/// Solves v0 + v1 + v2 = 1, v1 + 2 v2 = r for (v1, v2):
/// v2 = r - 1 + v0, v1 = 2 - 2 v0 - r.
inline TernarySolution solve_ternary_system(const Rational& v0, const Rational& r) {
  if (v0 < 0 || v0 > 1) throw DomainError("v0 must lie in [0,1], got " + to_fraction_string(v0));
  if (r < 0 || r > 2) throw DomainError("r must lie in [0,2], got " + to_fraction_string(r));
  TernarySolution sol{Rational(2 - 2 * v0 - r), Rational(r - 1 + v0)};
  if (sol.v1 < 0 || sol.v1 > 1 || sol.v2 < 0 || sol.v2 > 1) {
    throw InfeasibleError("no frequency vector has v0 = " + to_fraction_string(v0) + " and mean " +
                          to_fraction_string(r) + " (v1 = " + to_fraction_string(sol.v1) +
                          ", v2 = " + to_fraction_string(sol.v2) + "; both must lie in [0,1])");
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Finite-depth limit diagnostics. A verdict is evidence about a limit, never a
// proof: Converged means the tail window is flat to within `gap`, Oscillating
// means the tail window keeps revisiting two separated levels.

struct Sample {
  std::uint64_t depth = 0;
  Rational value;
};

struct Converged {
  Rational value;
  std::uint64_t depth = 0;
  Rational tolerance;
};

struct Oscillating {
  Rational liminf_estimate;
  Rational limsup_estimate;
  std::vector<std::uint64_t> low_witnesses;
  std::vector<std::uint64_t> high_witnesses;
};

struct Undetermined {
  std::uint64_t depth = 0;
};

using ConvergenceVerdict = std::variant<Converged, Oscillating, Undetermined>;

struct ClassifyOptions {
  Rational gap{1, 1000};
  Rational tail_fraction{1, 2};
  std::size_t min_excursions = 2;
};

/// Examines the last `tail_fraction` of the samples (never fewer than four).
/// A flat tail (max - min <= gap) converges to its midpoint. Otherwise the
/// tail is split into a high band (top quarter of its range) and a low band
/// (bottom quarter); visits alternating between the bands are excursions, and
/// at least `min_excursions` per band make the tail Oscillating.
inline ConvergenceVerdict classify_limit(std::span<const Sample> samples, const ClassifyOptions& opts = {}) {
  if (opts.gap <= 0) throw DomainError("gap must be positive");
  if (opts.tail_fraction <= 0 || opts.tail_fraction > 1) throw DomainError("tail_fraction must lie in (0,1]");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].depth <= samples[i - 1].depth) throw DomainError("sample depths must be strictly ascending");
  }
  constexpr std::size_t kMinSamples = 4;
  if (samples.size() < kMinSamples) return Undetermined{samples.empty() ? 0 : samples.back().depth};

  const BigInt m = samples.size();
  const BigInt want = -floor_div(-m * numerator_of(opts.tail_fraction), denominator_of(opts.tail_fraction));
  const auto tail_len = std::max(kMinSamples, static_cast<std::size_t>(want));
  const auto tail = samples.subspan(samples.size() - std::min(tail_len, samples.size()));

  const auto [lo_it, hi_it] =
      std::minmax_element(tail.begin(), tail.end(), [](const Sample& a, const Sample& b) { return a.value < b.value; });
  const Rational lo = lo_it->value;
  const Rational hi = hi_it->value;
  const Rational spread = hi - lo;
  if (spread <= opts.gap) {
    return Converged{Rational((lo + hi) / 2), tail.back().depth, opts.gap};
  }

  const Rational high_cut = hi - spread / 4;
  const Rational low_cut = lo + spread / 4;
  enum class Band { kNone, kLow, kHigh };
  Band current = Band::kNone;
  std::vector<std::uint64_t> lows;
  std::vector<std::uint64_t> highs;
  Rational extreme;
  for (const auto& smp : tail) {
    Band b = Band::kNone;
    if (smp.value >= high_cut) b = Band::kHigh;
    if (smp.value <= low_cut) b = Band::kLow;
    if (b == Band::kNone) continue;
    if (b != current) {
      current = b;
      extreme = smp.value;
      (b == Band::kHigh ? highs : lows).push_back(smp.depth);
    } else if ((b == Band::kHigh && smp.value > extreme) || (b == Band::kLow && smp.value < extreme)) {
      extreme = smp.value;
      (b == Band::kHigh ? highs : lows).back() = smp.depth;
    }
  }
  if (lows.size() >= opts.min_excursions && highs.size() >= opts.min_excursions) {
    return Oscillating{lo, hi, std::move(lows), std::move(highs)};
  }
  return Undetermined{tail.back().depth};
}

inline ConvergenceVerdict classify_limit(std::span<const Sample> samples, const Rational& gap,
                                         const Rational& tail_fraction) {
  ClassifyOptions opts;
  opts.gap = gap;
  opts.tail_fraction = tail_fraction;
  return classify_limit(samples, opts);
}

inline std::string verdict_name(const ConvergenceVerdict& v) {
  if (std::holds_alternative<Converged>(v)) return "converged";
  if (std::holds_alternative<Oscillating>(v)) return "oscillating";
  return "undetermined";
}

// ---------------------------------------------------------------------------
// Emission

/// Header `n,N0..N{s-1},v0..v{s-1},r` followed by the same rationals as
/// 20-significant-digit decimals (`v0_dec..`, `r_dec`).
inline void write_stats_csv(std::ostream& os, std::span<const PartialStats> rows, std::size_t radix) {
  os << "n";
  for (std::size_t i = 0; i < radix; ++i) os << ",N" << i;
  for (std::size_t i = 0; i < radix; ++i) os << ",v" << i;
  os << ",r";
  for (std::size_t i = 0; i < radix; ++i) os << ",v" << i << "_dec";
  os << ",r_dec\n";
  for (const auto& row : rows) {
    os << row.n;
    for (auto c : row.counts) os << ',' << c;
    for (const auto& v : row.freqs) os << ',' << to_fraction_string(v);
    os << ',' << to_fraction_string(row.mean);
    for (const auto& v : row.freqs) os << ',' << to_decimal_string(v);
    os << ',' << to_decimal_string(row.mean) << '\n';
  }
}

inline nlohmann::json rational_json(const Rational& r) {
  return {{"exact", to_fraction_string(r)}, {"decimal", to_decimal_string(r)}};
}

inline nlohmann::json stats_json(const PartialStats& row) {
  nlohmann::json freqs = nlohmann::json::array();
  for (const auto& v : row.freqs) freqs.push_back(rational_json(v));
  return {{"n", row.n}, {"counts", row.counts}, {"freqs", freqs}, {"r", rational_json(row.mean)}};
}

inline nlohmann::json stats_json(const RunningStats& rs) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rs.rows) rows.push_back(stats_json(row));
  return {{"rows", rows}, {"truncated", rs.truncated}, {"consumed", rs.consumed}};
}

inline nlohmann::json verdict_json(const ConvergenceVerdict& v) {
  nlohmann::json j{{"verdict", verdict_name(v)}};
  if (const auto* c = std::get_if<Converged>(&v)) {
    j["value"] = rational_json(c->value);
    j["depth"] = c->depth;
    j["tolerance"] = rational_json(c->tolerance);
  } else if (const auto* o = std::get_if<Oscillating>(&v)) {
    j["liminf_estimate"] = rational_json(o->liminf_estimate);
    j["limsup_estimate"] = rational_json(o->limsup_estimate);
    j["low_witnesses"] = o->low_witnesses;
    j["high_witnesses"] = o->high_witnesses;
  } else {
    j["depth"] = std::get<Undetermined>(v).depth;
  }
  return j;
}

}  // namespace digitstat
