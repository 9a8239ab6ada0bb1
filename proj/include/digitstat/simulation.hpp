#pragma once

// Monte Carlo check that uniformly random digits have relative mean close to
// (s-1)/2, with reproducible, order-independent seeding.
//
// Generator "splitmix64-ctr/v1": the i-th output (i = 0, 1, ...) under key k is
//
//   mix64(k + (i + 1) * 0x9E3779B97F4A7C15)     (arithmetic mod 2^64)
//
// where mix64 is the SplitMix64 finalizer
//
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z =  z ^ (z >> 31)
//
// The seed of trial t under master seed m is output t of key m. A digit in
// base s is drawn by rejection: outputs u < (2^64 mod s) are discarded,
// otherwise the digit is u mod s.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "digitstat/digit_core.hpp"
#include "digitstat/errors.hpp"
#include "digitstat/rational.hpp"
#include "digitstat/stats.hpp"

namespace digitstat {

inline constexpr const char* kRngId = "splitmix64-ctr/v1";

class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
  }

  /// Output at an absolute counter position.
  [[nodiscard]] std::uint64_t at(std::uint64_t counter) const { return mix64(key_ + (counter + 1) * kGamma); }

  std::uint64_t operator()() { return at(counter_++); }

  /// Uniform value in [0, bound) by rejection sampling.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t reject_below = (0 - bound) % bound;  // 2^64 mod bound
    while (true) {
      const std::uint64_t u = (*this)();
      if (u >= reject_below) return u % bound;
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  return CounterRng(master_seed).at(trial_index);
}

/// Infinite stream of i.i.d. uniform digits keyed by `seed`.
inline DigitStream uniform_digit_stream(Radix radix, std::uint64_t seed) {
  return DigitStream(radix, [radix, seed]() -> DigitStream::Cursor {
    return [rng = CounterRng(seed), s = radix.value()]() mutable -> std::optional<Digit> {
      return static_cast<Digit>(rng.uniform_below(s));
    };
  });
}

inline PartialStats uniform_digit_trial(Radix radix, std::uint64_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("trial depth must be >= 1");
  const std::uint64_t depth[] = {n};
  return running_stats(uniform_digit_stream(radix, seed), depth).rows.front();
}

struct ExperimentConfig {
  Radix radix{3};
  std::uint64_t n = 10000;
  std::uint64_t trials = 200;
  std::uint64_t master_seed = 0;

  void validate() const {
    if (n < 1) throw DomainError("experiment depth n must be >= 1");
    if (trials < 1) throw DomainError("experiment needs at least one trial");
  }
};

struct ExperimentSummary {
  ExperimentConfig config;
  Rational band;
  std::vector<Rational> per_trial;  // r_n of each trial, in trial order
  Rational mean;
  double stddev = 0.0;  // sample standard deviation (n - 1 denominator; 0 for one trial)
  Rational fraction_in_band;

  friend bool operator==(const ExperimentSummary& a, const ExperimentSummary& b) {
    return a.config.radix == b.config.radix && a.config.n == b.config.n && a.config.trials == b.config.trials &&
           a.config.master_seed == b.config.master_seed && a.band == b.band && a.per_trial == b.per_trial &&
           a.mean == b.mean && a.stddev == b.stddev && a.fraction_in_band == b.fraction_in_band;
  }
};

/// Aggregates per-trial means; depends only on the values, never on the order
/// in which trials finished.
inline ExperimentSummary summarize_trials(const ExperimentConfig& cfg, const Rational& band,
                                          std::vector<Rational> per_trial) {
  ExperimentSummary out;
  out.config = cfg;
  out.band = band;
  const Rational center(BigInt(cfg.radix.value() - 1), BigInt(2));
  const BigInt count(per_trial.size());
  Rational sum = 0;
  std::uint64_t inside = 0;
  for (const auto& r : per_trial) {
    sum += r;
    const Rational dev = r - center;
    if (dev <= band && -dev <= band) ++inside;
  }
  out.mean = sum / count;
  if (per_trial.size() > 1) {
    Rational ss = 0;
    for (const auto& r : per_trial) {
      const Rational d = r - out.mean;
      ss += d * d;
    }
    out.stddev = std::sqrt(to_double(Rational(ss / (count - 1))));
  }
  out.fraction_in_band = Rational(BigInt(inside), count);
  out.per_trial = std::move(per_trial);
  return out;
}

/// Runs cfg.trials independent trials. `threads` only changes scheduling:
/// every trial has its own seed and writes its own slot.
inline ExperimentSummary normality_experiment(const ExperimentConfig& cfg, const Rational& band,
                                              unsigned threads = 1) {
  cfg.validate();
  if (band < 0) throw DomainError("band must be >= 0");
  std::vector<Rational> per_trial(static_cast<std::size_t>(cfg.trials));
  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      per_trial[static_cast<std::size_t>(t)] = uniform_digit_trial(cfg.radix, cfg.n, trial_seed(cfg.master_seed, t)).mean;
    }
  };
  const std::uint64_t workers = std::clamp<std::uint64_t>(threads, 1, cfg.trials);
  if (workers == 1) {
    run_range(0, cfg.trials);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (cfg.trials + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(cfg.trials, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
  }
  return summarize_trials(cfg, band, std::move(per_trial));
}

inline nlohmann::json summary_json(const ExperimentSummary& s) {
  nlohmann::json per_trial = nlohmann::json::array();
  for (const auto& r : s.per_trial) per_trial.push_back(to_decimal_string(r));
  return {
      {"config",
       {{"base", s.config.radix.value()},
        {"n", s.config.n},
        {"trials", s.config.trials},
        {"seed", s.config.master_seed},
        {"band", to_fraction_string(s.band)}}},
      {"rng_id", kRngId},
      {"per_trial", per_trial},
      {"mean", to_decimal_string(s.mean)},
      {"stddev", to_decimal_string(Rational(s.stddev), 17)},
      {"fraction_in_band", to_decimal_string(s.fraction_in_band)},
  };
}

}  // namespace digitstat
