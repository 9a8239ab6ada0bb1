#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "digitstat/constructors.hpp"
#include "digitstat/stats.hpp"
#include "oracles.hpp"

namespace digitstat {
namespace {

using Digits = std::vector<Digit>;

Rational weighted_sum(const PartialStats& st) {
  Rational total = 0;
  for (std::size_t i = 0; i < st.freqs.size(); ++i) total += Rational(BigInt(i)) * st.freqs[i];
  return total;
}

TEST(RunningStats, CyclicStream) {
  const auto stream = DigitStream::from_function(Radix(3), [](std::uint64_t m) { return Digit((m - 1) % 3); });
  const std::uint64_t cps[] = {3};
  const auto rs = running_stats(stream, cps);
  ASSERT_EQ(rs.rows.size(), 1U);
  const auto& st = rs.rows[0];
  EXPECT_EQ(st.counts, (std::vector<std::uint64_t>{1, 1, 1}));
  for (const auto& v : st.freqs) EXPECT_EQ(v, Rational(1, 3));
  EXPECT_EQ(st.mean, Rational(1));
  EXPECT_FALSE(rs.truncated);
}

TEST(RunningStats, ConstantTwo) {
  const std::uint64_t cps[] = {10};
  const auto st = running_stats(DigitStream::constant(Radix(3), 2), cps).rows.at(0);
  EXPECT_EQ(st.freqs[2], Rational(1));
  EXPECT_EQ(st.mean, Rational(2));
}

TEST(RunningStats, NoMeanPrefixAtThirdZeroRunEnd) {
  // brute force over the literal prefix 0,1,0,0,1,1,0,0,0,0
  const Digits literal{0, 1, 0, 0, 1, 1, 0, 0, 0, 0};
  const Rational expected = oracle::prefix_mean(literal, 10);
  ASSERT_EQ(expected, Rational(3, 10));
  const std::uint64_t cps[] = {10};
  EXPECT_EQ(running_stats(no_mean_stream(), cps).rows.at(0).mean, expected);
}

TEST(RunningStats, TruncatedFiniteStream) {
  const auto stream = DigitStream::from_digits(Radix(2), {1, 0, 1, 1, 0});
  const std::uint64_t cps[] = {2, 4, 8, 16};
  const auto rs = running_stats(stream, cps);
  EXPECT_TRUE(rs.truncated);
  EXPECT_EQ(rs.consumed, 5U);
  ASSERT_EQ(rs.rows.size(), 3U);
  EXPECT_EQ(rs.rows.back().n, 5U);
  EXPECT_EQ(rs.rows.back().mean, Rational(3, 5));
}

TEST(RunningStats, CheckpointValidation) {
  const auto s = DigitStream::constant(Radix(2), 0);
  const std::uint64_t empty[] = {1};
  EXPECT_NO_THROW(running_stats(s, empty));
  EXPECT_THROW(running_stats(s, std::span<const std::uint64_t>{}), DomainError);
  const std::uint64_t zero[] = {0, 3};
  EXPECT_THROW(running_stats(s, zero), DomainError);
  const std::uint64_t unsorted[] = {4, 4};
  EXPECT_THROW(running_stats(s, unsorted), DomainError);
}

// Exact identities at every checkpoint: sum of frequencies is 1, the mean is
// the frequency-weighted digit sum, and 0 <= r_n <= s-1.
TEST(RunningStats, FiniteLemmaOneIdentityFuzz) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint32_t s = 2 + static_cast<std::uint32_t>(rng() % 9);
    Digits digits(10000);
    for (auto& d : digits) d = static_cast<Digit>(rng() % s);
    const auto cps = geometric_checkpoints(1, 3, 10000, std::vector<std::uint64_t>{10000, 777});
    const auto rs = running_stats(DigitStream::from_digits(Radix(s), digits), cps);
    ASSERT_EQ(rs.rows.size(), cps.size());
    for (const auto& st : rs.rows) {
      Rational total = 0;
      for (const auto& v : st.freqs) total += v;
      ASSERT_EQ(total, Rational(1));
      ASSERT_EQ(st.mean, weighted_sum(st));
      ASSERT_EQ(st.mean, oracle::prefix_mean(digits, st.n));
      ASSERT_GE(st.mean, 0);
      ASSERT_LE(st.mean, Rational(s - 1));
      ASSERT_EQ(st.counts, oracle::counts(digits, st.n, s));
    }
  }
}

TEST(GeometricCheckpoints, MergesExtras) {
  const std::uint64_t extra[] = {5, 8, 100};
  EXPECT_EQ(geometric_checkpoints(1, 2, 20, extra), (std::vector<std::uint64_t>{1, 2, 4, 5, 8, 16}));
  EXPECT_THROW(geometric_checkpoints(0, 2, 10), DomainError);
  EXPECT_THROW(geometric_checkpoints(1, 1, 10), DomainError);
}

TEST(MeanFromFrequencies, Examples) {
  const Radix t(3);
  EXPECT_EQ(mean_from_frequencies(FrequencyProfile::make(t, {Rational(1, 3), Rational(1, 3), Rational(1, 3)})),
            Rational(1));
  EXPECT_EQ(mean_from_frequencies(FrequencyProfile::make(t, {Rational(1), Rational(0), Rational(0)})), Rational(0));
  EXPECT_EQ(mean_from_frequencies(FrequencyProfile::make(t, {Rational(0), Rational(0), Rational(1)})), Rational(2));
}

TEST(FrequencyProfile, Validation) {
  EXPECT_THROW(FrequencyProfile::make(Radix(3), {Rational(1, 2), Rational(1, 2)}), DomainError);
  EXPECT_THROW(FrequencyProfile::make(Radix(3), {Rational(1, 2), Rational(1, 2), Rational(1, 2)}), DomainError);
  EXPECT_THROW(FrequencyProfile::make(Radix(2), {Rational(3, 2), Rational(-1, 2)}), DomainError);
}

TEST(MeanFromFrequencies, StaysInDigitRange) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::uint32_t s = 2 + static_cast<std::uint32_t>(rng() % 9);
    std::vector<BigInt> w(s);
    BigInt total = 0;
    for (auto& x : w) total += (x = rng() % 50);
    if (total == 0) continue;
    std::vector<Rational> tau;
    for (const auto& x : w) tau.emplace_back(x, total);
    const auto theta = mean_from_frequencies(FrequencyProfile::make(Radix(s), tau));
    EXPECT_GE(theta, 0);
    EXPECT_LE(theta, Rational(s - 1));
  }
}

TEST(ExactFrequenciesRational, Examples) {
  const Radix t(3);
  auto half = exact_frequencies_rational(expand_rational(1, 2, t));
  EXPECT_EQ(half.tau(), (std::vector<Rational>{0, 1, 0}));
  EXPECT_EQ(half.theta(), Rational(1));

  auto quarter = exact_frequencies_rational(expand_rational(1, 4, t));
  EXPECT_EQ(quarter.tau(), (std::vector<Rational>{Rational(1, 2), 0, Rational(1, 2)}));
  EXPECT_EQ(quarter.theta(), Rational(1));

  auto third = exact_frequencies_rational(expand_rational(1, 3, t));
  EXPECT_EQ(third.tau(), (std::vector<Rational>{1, 0, 0}));
  EXPECT_EQ(third.theta(), Rational(0));
}

TEST(ExactFrequenciesRational, PreperiodIgnored) {
  // 5/6 = 0.2(1)_3: the leading 2 does not count
  EXPECT_EQ(exact_frequencies_rational(expand_rational(5, 6, Radix(3))).tau(), (std::vector<Rational>{0, 1, 0}));
}

TEST(SolveTernarySystem, Examples) {
  EXPECT_EQ(solve_ternary_system(Rational(1, 3), Rational(1)), (TernarySolution{Rational(1, 3), Rational(1, 3)}));
  EXPECT_EQ(solve_ternary_system(Rational(0), Rational(2)), (TernarySolution{Rational(0), Rational(1)}));
  EXPECT_EQ(solve_ternary_system(Rational(1, 2), Rational(4, 5)), (TernarySolution{Rational(1, 5), Rational(3, 10)}));
  EXPECT_THROW(solve_ternary_system(parse_rational("0.9"), parse_rational("1.5")), InfeasibleError);
  EXPECT_THROW(solve_ternary_system(Rational(2), Rational(1)), DomainError);
  EXPECT_THROW(solve_ternary_system(Rational(0), Rational(3)), DomainError);
}

TEST(SolveTernarySystem, RoundTripOverRandomProfiles) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const BigInt q = 1 + rng() % 1000;
    const BigInt a = rng() % (q + 1);
    const BigInt b = rng() % (q - a + 1);
    const Rational v0(a, q), v1(b, q), v2(q - a - b, q);
    const auto sol = solve_ternary_system(v0, Rational(v1 + 2 * v2));
    ASSERT_EQ(sol.v1, v1);
    ASSERT_EQ(sol.v2, v2);
    ASSERT_EQ(v0 + sol.v1 + sol.v2, Rational(1));
  }
}

// Two ternary checkpoints l, m: the derived v1 moves by at most
// 2 |dv0| + |dr|, so convergent v0 and r carry v1 and v2 along.
TEST(SolveTernarySystem, TransportBoundAcrossCheckpoints) {
  const auto quota = quota_stream(FrequencyProfile::make(Radix(3), {Rational(1, 2), Rational(1, 5), Rational(3, 10)}));
  const auto cps = geometric_checkpoints(16, 2, 1 << 16);
  const auto rows = running_stats(quota, cps).rows;
  std::vector<Sample> r_samples, v0_samples;
  for (const auto& st : rows) {
    r_samples.push_back({st.n, st.mean});
    v0_samples.push_back({st.n, st.freqs[0]});
  }
  const ClassifyOptions opts{Rational(1, 100), Rational(1, 2), 2};
  ASSERT_TRUE(std::holds_alternative<Converged>(classify_limit(r_samples, opts)));
  ASSERT_TRUE(std::holds_alternative<Converged>(classify_limit(v0_samples, opts)));
  for (const auto& l : rows) {
    for (const auto& m : rows) {
      const auto sl = solve_ternary_system(l.freqs[0], l.mean);
      const auto sm = solve_ternary_system(m.freqs[0], m.mean);
      ASSERT_EQ(sl.v1, l.freqs[1]);
      ASSERT_EQ(sl.v2, l.freqs[2]);
      auto abs = [](Rational x) { return x < 0 ? Rational(-x) : x; };
      ASSERT_LE(abs(sm.v1 - sl.v1), 2 * abs(m.freqs[0] - l.freqs[0]) + abs(m.mean - l.mean));
      ASSERT_LE(abs(sm.v2 - sl.v2), abs(m.freqs[0] - l.freqs[0]) + abs(m.mean - l.mean));
    }
  }
}

TEST(ClassifyLimit, ConstantConverges) {
  std::vector<Sample> samples;
  for (std::uint64_t n = 1; n <= 10; ++n) samples.push_back({n, Rational(7, 3)});
  const auto v = classify_limit(samples);
  ASSERT_TRUE(std::holds_alternative<Converged>(v));
  EXPECT_EQ(std::get<Converged>(v).value, Rational(7, 3));
  EXPECT_EQ(std::get<Converged>(v).depth, 10U);
}

TEST(ClassifyLimit, TooFewSamples) {
  std::vector<Sample> samples{{1, 0}, {2, 1}, {3, 0}};
  EXPECT_TRUE(std::holds_alternative<Undetermined>(classify_limit(samples)));
}

TEST(ClassifyLimit, FloorAverageOfOneThirdConverges) {
  // w_n for constant 1/3, evaluated by direct summation at every depth
  std::vector<Sample> samples;
  const Rational x(1, 3);
  BigInt sum = 0;
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    sum += BigInt(n) / 3;
    if (n >= 10) samples.push_back({n, Rational(2 * sum, BigInt(n) * BigInt(n + 1))});
  }
  const auto v = classify_limit(samples, Rational(1, 1000), Rational(1, 2));
  ASSERT_TRUE(std::holds_alternative<Converged>(v)) << verdict_name(v);
  const auto& c = std::get<Converged>(v);
  EXPECT_LE(c.value, x);
  EXPECT_GT(c.value, x - Rational(1, 1000));
}

TEST(ClassifyLimit, MonotoneDriftIsNotOscillation) {
  std::vector<Sample> samples;
  for (std::uint64_t n = 1; n <= 20; ++n) samples.push_back({n, Rational(BigInt(n), BigInt(10))});
  EXPECT_TRUE(std::holds_alternative<Undetermined>(classify_limit(samples)));
}

TEST(ClassifyLimit, AlternatingLevelsOscillate) {
  std::vector<Sample> samples;
  for (std::uint64_t n = 1; n <= 12; ++n) samples.push_back({n, n % 2 ? Rational(1, 4) : Rational(3, 4)});
  const auto v = classify_limit(samples);
  ASSERT_TRUE(std::holds_alternative<Oscillating>(v));
  const auto& o = std::get<Oscillating>(v);
  EXPECT_EQ(o.liminf_estimate, Rational(1, 4));
  EXPECT_EQ(o.limsup_estimate, Rational(3, 4));
  EXPECT_GE(o.low_witnesses.size(), 2U);
  EXPECT_GE(o.high_witnesses.size(), 2U);
}

TEST(ClassifyLimit, RejectsBadOptions) {
  std::vector<Sample> samples{{1, 0}, {2, 0}, {3, 0}, {4, 0}};
  EXPECT_THROW(classify_limit(samples, Rational(0), Rational(1, 2)), DomainError);
  EXPECT_THROW(classify_limit(samples, Rational(1, 10), Rational(0)), DomainError);
  EXPECT_THROW(classify_limit(samples, Rational(1, 10), Rational(3, 2)), DomainError);
  std::vector<Sample> unsorted{{2, 0}, {1, 0}, {3, 0}, {4, 0}};
  EXPECT_THROW(classify_limit(unsorted), DomainError);
}

TEST(StatsCsv, HeaderAndRows) {
  const std::uint64_t cps[] = {3};
  const auto rs = running_stats(DigitStream::from_digits(Radix(3), {0, 1, 2}), cps);
  std::ostringstream os;
  write_stats_csv(os, rs.rows, 3);
  EXPECT_EQ(os.str(),
            "n,N0,N1,N2,v0,v1,v2,r,v0_dec,v1_dec,v2_dec,r_dec\n"
            "3,1,1,1,1/3,1/3,1/3,1/1,0.33333333333333333333,0.33333333333333333333,0.33333333333333333333,"
            "1.0000000000000000000\n");
}

TEST(StatsJson, MirrorsCsvFields) {
  const std::uint64_t cps[] = {2};
  const auto rs = running_stats(DigitStream::from_digits(Radix(2), {1, 0}), cps);
  const auto j = stats_json(rs);
  EXPECT_EQ(j["rows"][0]["n"], 2);
  EXPECT_EQ(j["rows"][0]["counts"], nlohmann::json::array({1, 1}));
  EXPECT_EQ(j["rows"][0]["freqs"][1]["exact"], "1/2");
  EXPECT_EQ(j["rows"][0]["r"]["decimal"], "0.50000000000000000000");
  EXPECT_EQ(j["truncated"], false);
}

}  // namespace
}  // namespace digitstat
