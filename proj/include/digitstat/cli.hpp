#pragma once

// Batch command-line front end. Each subcommand forwards to one library
// operation and renders its result as a table, CSV or JSON.
//
// Exit codes: 0 success, 1 domain/infeasible/io error, 2 usage error. Errors
// are reported on one line as `error[<kind>]: <message>`.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "digitstat/constructors.hpp"
#include "digitstat/digit_core.hpp"
#include "digitstat/errors.hpp"
#include "digitstat/rational.hpp"
#include "digitstat/simulation.hpp"
#include "digitstat/stats.hpp"

namespace digitstat::cli {

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

enum class Format { kTable, kCsv, kJson };

inline Rational parse_flag_rational(const std::string& flag, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const DomainError& e) {
    throw UsageError("--" + flag + ": " + e.what());
  }
}

inline std::uint64_t parse_count(const std::string& what, const std::string& text) {
  if (!detail::all_digits(text) || text.size() > 19) throw UsageError(what + ": expected a non-negative integer, got '" + text + "'");
  return std::stoull(text);
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

/// `geometric:start,factor,max` or `list:n1,n2,...`.
struct CheckpointSpec {
  std::vector<std::uint64_t> explicit_list;
  std::uint64_t start = 0, factor = 0, max = 0;
  bool geometric = false;

  [[nodiscard]] std::vector<std::uint64_t> resolve(std::span<const std::uint64_t> extra = {}) const {
    if (geometric) return geometric_checkpoints(start, factor, max, extra);
    return explicit_list;
  }
};

inline CheckpointSpec parse_checkpoints(const std::string& text) {
  CheckpointSpec spec;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--checkpoints: expected geometric:start,factor,max or list:n1,n2,...");
  const std::string kind = text.substr(0, colon);
  const auto parts = split(text.substr(colon + 1), ',');
  if (kind == "geometric") {
    if (parts.size() != 3) throw UsageError("--checkpoints geometric needs start,factor,max");
    spec.geometric = true;
    spec.start = parse_count("--checkpoints", parts[0]);
    spec.factor = parse_count("--checkpoints", parts[1]);
    spec.max = parse_count("--checkpoints", parts[2]);
    if (spec.start < 1 || spec.factor < 2) throw UsageError("--checkpoints geometric needs start >= 1 and factor >= 2");
  } else if (kind == "list") {
    if (parts.empty()) throw UsageError("--checkpoints list is empty");
    for (const auto& p : parts) spec.explicit_list.push_back(parse_count("--checkpoints", p));
    if (spec.explicit_list.front() < 1 ||
        std::adjacent_find(spec.explicit_list.begin(), spec.explicit_list.end(),
                           [](auto a, auto b) { return b <= a; }) != spec.explicit_list.end()) {
      throw UsageError("--checkpoints list must be strictly ascending and >= 1");
    }
  } else {
    throw UsageError("--checkpoints: unknown kind '" + kind + "'");
  }
  return spec;
}

inline std::vector<Digit> read_digit_text(std::istream& in, Radix radix) {
  std::vector<Digit> digits;
  char c = 0;
  std::uint64_t pos = 0;
  while (in.get(c)) {
    ++pos;
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    auto d = digit_from_char(c);
    if (!d || !radix.contains(*d)) {
      throw DomainError("digit input: character '" + std::string(1, c) + "' at offset " + std::to_string(pos) +
                        " is not a base-" + std::to_string(radix.value()) + " digit");
    }
    digits.push_back(*d);
  }
  return digits;
}

// ---------------------------------------------------------------------------
// Rendering helpers

inline void render_stats(std::ostream& os, const RunningStats& rs, std::size_t radix, Format fmt) {
  switch (fmt) {
    case Format::kCsv:
      write_stats_csv(os, rs.rows, radix);
      break;
    case Format::kJson: {
      auto j = stats_json(rs);
      j["base"] = radix;
      os << j.dump(2) << '\n';
      break;
    }
    case Format::kTable:
      os << std::left << std::setw(12) << "n";
      for (std::size_t i = 0; i < radix; ++i) os << std::setw(12) << ("N" + std::to_string(i));
      for (std::size_t i = 0; i < radix; ++i) os << std::setw(24) << ("v" + std::to_string(i));
      os << "r\n";
      for (const auto& row : rs.rows) {
        os << std::setw(12) << row.n;
        for (auto c : row.counts) os << std::setw(12) << c;
        for (const auto& v : row.freqs) os << std::setw(24) << to_decimal_string(v);
        os << to_decimal_string(row.mean) << '\n';
      }
      if (rs.truncated) os << "# stream ended at depth " << rs.consumed << " before the last checkpoint\n";
      break;
  }
}

inline void render_digits(std::ostream& os, std::span<const Digit> digits, Format fmt) {
  if (fmt == Format::kJson) {
    os << nlohmann::json{{"count", digits.size()}, {"digits", digits_to_string(digits)}}.dump(2) << '\n';
  } else {
    os << digits_to_string(digits) << '\n';
  }
}

enum class Emit { kDigits, kStats, kBlocks };

inline Emit parse_emit(const std::string& text) {
  if (text == "digits") return Emit::kDigits;
  if (text == "stats") return Emit::kStats;
  if (text == "blocks") return Emit::kBlocks;
  throw UsageError("--emit: unknown value '" + text + "'");
}

// ---------------------------------------------------------------------------

struct Flags {
  std::string base, rational, count, a, b, tau, theta, x1, x2, eps, blocks, checkpoints, n, k, trials, seed, band,
      out, emit, threads, input = "-";
  std::string format = "table";
};

/// Parses and runs one command line. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"Exact s-ary digit statistics and constructions of numbers with prescribed digit statistics",
               "digitstat"};
  app.require_subcommand(1);
  Flags f;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", f.format, "table | csv | json")->check(CLI::IsMember({"table", "csv", "json"}));
    sub->add_option("--out", f.out, "write output to this path instead of stdout");
  };

  auto* digits = app.add_subcommand("digits", "canonical expansion of a rational p/q in [0,1)");
  digits->add_option("--base", f.base)->required();
  digits->add_option("--rational", f.rational, "p/q or a finite decimal")->required();
  digits->add_option("--count", f.count, "number of digits to print (default 20)");
  add_format(digits);

  auto* stats = app.add_subcommand("stats", "running digit statistics of a digit file (or stdin)");
  stats->add_option("--base", f.base)->required();
  stats->add_option("input", f.input, "digit file, '-' for stdin");
  stats->add_option("--checkpoints", f.checkpoints, "geometric:start,factor,max | list:n1,n2,...");
  add_format(stats);

  auto* cfreq = app.add_subcommand("construct-freq", "number with preassigned digit frequencies");
  cfreq->add_option("--a", f.a, "target frequency of 0 (Beatty construction, ternary)");
  cfreq->add_option("--b", f.b, "target frequency of 1 (Beatty construction, ternary)");
  cfreq->add_option("--tau", f.tau, "t0,t1,...: full profile (quota construction)");
  cfreq->add_option("--base", f.base, "radix for --tau (defaults to the number of entries)");
  cfreq->add_option("--count", f.count)->required();
  cfreq->add_option("--emit", f.emit, "digits | stats");
  cfreq->add_option("--checkpoints", f.checkpoints);
  add_format(cfreq);

  auto* cmean = app.add_subcommand("construct-mean-nofreq", "ternary number with digit mean theta but no frequencies");
  cmean->add_option("--theta", f.theta)->required();
  cmean->add_option("--x1", f.x1)->required();
  cmean->add_option("--x2", f.x2)->required();
  cmean->add_option("--eps", f.eps)->required();
  cmean->add_option("--blocks", f.blocks)->required();
  cmean->add_option("--emit", f.emit, "blocks | digits | stats");
  cmean->add_option("--checkpoints", f.checkpoints);
  add_format(cmean);

  auto* nomean = app.add_subcommand("no-mean-example", "the runs 0^(2^m) 1^(2^m), which have no digit mean");
  nomean->add_option("--count", f.count)->required();
  nomean->add_option("--emit", f.emit, "digits | stats");
  nomean->add_option("--checkpoints", f.checkpoints);
  add_format(nomean);

  auto* lemma2 = app.add_subcommand("lemma2", "floor-weighted average ([kx] + ... + [nx]) / (n(n+1)/2)");
  lemma2->add_option("--rational", f.rational, "x >= 0")->required();
  lemma2->add_option("--k", f.k, "first term (default 1)");
  lemma2->add_option("--n", f.n, "last term");
  lemma2->add_option("--checkpoints", f.checkpoints, "evaluate at several n");
  add_format(lemma2);

  auto* sched = app.add_subcommand("schedule", "two-level oscillating schedule and its breakpoints");
  sched->add_option("--x1", f.x1)->required();
  sched->add_option("--x2", f.x2)->required();
  sched->add_option("--eps", f.eps)->required();
  sched->add_option("--n", f.n, "horizon")->required();
  add_format(sched);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo digit mean of uniformly random numbers");
  sim->add_option("--base", f.base)->required();
  sim->add_option("--n", f.n)->required();
  sim->add_option("--trials", f.trials)->required();
  sim->add_option("--seed", f.seed)->required();
  sim->add_option("--band", f.band, "half-width around (s-1)/2 (default 0.033)");
  sim->add_option("--threads", f.threads, "worker threads (default 1); output does not depend on it");
  add_format(sim);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << '\n';
    return 2;
  }

  std::ostringstream buf;
  try {
    const Format fmt = f.format == "csv" ? Format::kCsv : f.format == "json" ? Format::kJson : Format::kTable;
    auto radix_flag = [&]() {
      const auto s = parse_count("--base", f.base);
      if (s < 2 || s > Radix::kMax) throw UsageError("--base must lie in [2, " + std::to_string(Radix::kMax) + "]");
      return Radix(static_cast<std::uint32_t>(s));
    };
    auto emit_or = [&](Emit fallback) { return f.emit.empty() ? fallback : parse_emit(f.emit); };

    if (*digits) {
      const Radix radix = radix_flag();
      const Rational value = parse_flag_rational("rational", f.rational);
      const std::uint64_t count = f.count.empty() ? 20 : parse_count("--count", f.count);
      const auto e = expand_rational(value, radix);
      const auto shown = e.stream().take(count);
      if (fmt == Format::kJson) {
        const auto freq = exact_frequencies_rational(e);
        nlohmann::json tau = nlohmann::json::array();
        for (const auto& t : freq.tau()) tau.push_back(rational_json(t));
        buf << nlohmann::json{{"base", radix.value()},
                              {"rational", to_fraction_string(value)},
                              {"expansion", to_string(e)},
                              {"preperiod", digits_to_string(e.preperiod())},
                              {"period", digits_to_string(e.period())},
                              {"digits", digits_to_string(shown)},
                              {"frequencies", tau},
                              {"theta", rational_json(mean_from_frequencies(freq))}}
                   .dump(2)
            << '\n';
      } else if (fmt == Format::kCsv) {
        buf << "base,rational,expansion,preperiod,period,digits\n"
            << radix.value() << ',' << to_fraction_string(value) << ',' << to_string(e) << ','
            << digits_to_string(e.preperiod()) << ',' << digits_to_string(e.period()) << ','
            << digits_to_string(shown) << '\n';
      } else {
        buf << to_string(e) << '\n' << digits_to_string(shown) << '\n';
      }
    } else if (*stats) {
      const Radix radix = radix_flag();
      std::optional<CheckpointSpec> cps;
      if (!f.checkpoints.empty()) cps = parse_checkpoints(f.checkpoints);
      std::vector<Digit> digits_in;
      if (f.input == "-") {
        digits_in = read_digit_text(in, radix);
      } else {
        std::ifstream file(f.input, std::ios::binary);
        if (!file) throw IoError("cannot open digit file '" + f.input + "'");
        digits_in = read_digit_text(file, radix);
      }
      if (digits_in.empty()) throw DomainError("digit input is empty");
      const auto len = static_cast<std::uint64_t>(digits_in.size());
      const std::uint64_t last[] = {len};
      const auto checkpoints = cps ? cps->resolve() : geometric_checkpoints(1, 2, len, last);
      const auto rs = running_stats(DigitStream::from_digits(radix, std::move(digits_in)), checkpoints);
      render_stats(buf, rs, radix.value(), fmt);
    } else if (*cfreq) {
      const bool beatty = !f.a.empty() || !f.b.empty();
      const bool quota = !f.tau.empty();
      if (beatty == quota) throw UsageError("construct-freq needs either --a and --b, or --tau");
      if (beatty && (f.a.empty() || f.b.empty())) throw UsageError("construct-freq needs both --a and --b");
      if (beatty && !f.base.empty() && f.base != "3") throw UsageError("--a/--b construction is ternary only");
      const std::uint64_t count = parse_count("--count", f.count);
      std::optional<CheckpointSpec> cps;
      if (!f.checkpoints.empty()) cps = parse_checkpoints(f.checkpoints);
      const Emit emit = emit_or(Emit::kDigits);
      if (emit == Emit::kBlocks) throw UsageError("--emit blocks is only valid for construct-mean-nofreq");

      std::optional<DigitStream> stream;
      if (beatty) {
        stream = beatty_section3_stream(parse_flag_rational("a", f.a), parse_flag_rational("b", f.b));
      } else {
        std::vector<Rational> tau;
        for (const auto& part : split(f.tau, ',')) tau.push_back(parse_flag_rational("tau", part));
        if (tau.size() < 2) throw UsageError("--tau needs at least two entries");
        const Radix radix = f.base.empty() ? Radix(static_cast<std::uint32_t>(tau.size())) : radix_flag();
        stream = quota_stream(FrequencyProfile::make(radix, std::move(tau)));
      }
      if (emit == Emit::kDigits) {
        render_digits(buf, stream->take(count), fmt);
      } else {
        if (count < 1) throw UsageError("--count must be >= 1 for stats");
        const std::uint64_t last[] = {count};
        const auto checkpoints = cps ? cps->resolve() : geometric_checkpoints(1, 2, count, last);
        render_stats(buf, running_stats(*stream, checkpoints), stream->radix().value(), fmt);
      }
    } else if (*cmean) {
      const Rational theta = parse_flag_rational("theta", f.theta);
      const Rational x1 = parse_flag_rational("x1", f.x1);
      const Rational x2 = parse_flag_rational("x2", f.x2);
      const Rational eps = parse_flag_rational("eps", f.eps);
      const std::uint64_t blocks = parse_count("--blocks", f.blocks);
      std::optional<CheckpointSpec> cps;
      if (!f.checkpoints.empty()) cps = parse_checkpoints(f.checkpoints);
      const Emit emit = emit_or(Emit::kBlocks);
      const auto built = construct_mean_without_frequency(theta, x1, x2, eps, blocks);
      const auto& spec = *built.blocks;
      if (emit == Emit::kBlocks) {
        if (fmt == Format::kJson) {
          nlohmann::json rows = nlohmann::json::array();
          for (const auto& r : spec.rows) {
            rows.push_back({{"k", r.k},
                            {"a_k1", r.zeros},
                            {"a_k2", r.ones},
                            {"a_k3", r.twos},
                            {"alpha_k", to_fraction_string(r.alpha)}});
          }
          buf << nlohmann::json{{"theta", to_fraction_string(theta)},
                                {"breakpoints", built.schedule.breakpoints()},
                                {"total_digits", spec.total_length()},
                                {"blocks", rows}}
                     .dump(2)
              << '\n';
        } else {
          write_blockspec_csv(buf, spec);
        }
      } else if (emit == Emit::kDigits) {
        render_digits(buf, built.stream.take(spec.total_length()), fmt);
      } else {
        // default checkpoints: block ends at the schedule breakpoints plus a geometric grid
        const auto ends = spec.block_end_depths();
        std::vector<std::uint64_t> extra;
        for (auto bp : built.schedule.breakpoints()) extra.push_back(ends[static_cast<std::size_t>(bp - 1)]);
        extra.push_back(spec.total_length());
        const auto checkpoints = cps ? cps->resolve() : geometric_checkpoints(1, 2, spec.total_length(), extra);
        render_stats(buf, running_stats(built.stream, checkpoints), 3, fmt);
      }
    } else if (*nomean) {
      const std::uint64_t count = parse_count("--count", f.count);
      std::optional<CheckpointSpec> cps;
      if (!f.checkpoints.empty()) cps = parse_checkpoints(f.checkpoints);
      const Emit emit = emit_or(Emit::kDigits);
      if (emit == Emit::kBlocks) throw UsageError("--emit blocks is only valid for construct-mean-nofreq");
      if (emit == Emit::kDigits) {
        render_digits(buf, no_mean_example(count), fmt);
      } else {
        if (count < 1) throw UsageError("--count must be >= 1 for stats");
        std::vector<std::uint64_t> ends;
        for (unsigned m = 0; m < 62 && no_mean_zero_run_end(m) <= count; ++m) {
          ends.push_back(no_mean_zero_run_end(m));
          if (no_mean_one_run_end(m) <= count) ends.push_back(no_mean_one_run_end(m));
        }
        if (ends.empty() || ends.back() != count) ends.push_back(count);
        const auto checkpoints = cps ? cps->resolve() : ends;
        render_stats(buf, running_stats(no_mean_stream(), checkpoints), 3, fmt);
      }
    } else if (*lemma2) {
      const Rational x = parse_flag_rational("rational", f.rational);
      const std::uint64_t k = f.k.empty() ? 1 : parse_count("--k", f.k);
      if (f.n.empty() == f.checkpoints.empty()) throw UsageError("lemma2 needs exactly one of --n or --checkpoints");
      const auto ns = f.n.empty() ? parse_checkpoints(f.checkpoints).resolve()
                                  : std::vector<std::uint64_t>{parse_count("--n", f.n)};
      nlohmann::json rows = nlohmann::json::array();
      if (fmt == Format::kCsv) buf << "n,k,W,W_dec,lower,upper,sandwich\n";
      if (fmt == Format::kTable) {
        buf << std::left << std::setw(12) << "n" << std::setw(26) << "W" << std::setw(26) << "lower (strict)"
            << std::setw(26) << "upper" << "sandwich\n";
      }
      for (auto n : ns) {
        const Rational w = floor_weighted_average(x, k, n);
        const auto bounds = floor_average_bounds(x, k, n);
        const bool ok = bounds.lower < w && w <= bounds.upper;
        if (fmt == Format::kCsv) {
          buf << n << ',' << k << ',' << to_fraction_string(w) << ',' << to_decimal_string(w) << ','
              << to_fraction_string(bounds.lower) << ',' << to_fraction_string(bounds.upper) << ','
              << (ok ? "ok" : "violated") << '\n';
        } else if (fmt == Format::kTable) {
          buf << std::setw(12) << n << std::setw(26) << to_decimal_string(w) << std::setw(26)
              << to_decimal_string(bounds.lower) << std::setw(26) << to_decimal_string(bounds.upper)
              << (ok ? "ok" : "violated") << '\n';
        } else {
          rows.push_back({{"n", n},
                          {"k", k},
                          {"W", rational_json(w)},
                          {"lower", rational_json(bounds.lower)},
                          {"upper", rational_json(bounds.upper)},
                          {"sandwich", ok}});
        }
      }
      if (fmt == Format::kJson) buf << nlohmann::json{{"x", to_fraction_string(x)}, {"rows", rows}}.dump(2) << '\n';
    } else if (*sched) {
      const auto schedule = build_oscillating_schedule(parse_flag_rational("x1", f.x1), parse_flag_rational("x2", f.x2),
                                                       parse_flag_rational("eps", f.eps), parse_count("--n", f.n));
      const auto& bps = schedule.breakpoints();
      const auto& ws = schedule.breakpoint_w();
      if (fmt == Format::kJson) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < bps.size(); ++i) {
          rows.push_back({{"index", i + 1},
                          {"n", bps[i]},
                          {"value", to_fraction_string(schedule.value(bps[i]))},
                          {"w", rational_json(ws[i])}});
        }
        buf << nlohmann::json{{"x1", to_fraction_string(schedule.x1())},
                              {"x2", to_fraction_string(schedule.x2())},
                              {"eps", to_fraction_string(schedule.epsilon())},
                              {"horizon", schedule.horizon()},
                              {"breakpoints", rows}}
                   .dump(2)
            << '\n';
      } else {
        const char sep = fmt == Format::kCsv ? ',' : ' ';
        buf << "index" << sep << "n_k" << sep << "value" << sep << "w" << sep << "w_dec\n";
        for (std::size_t i = 0; i < bps.size(); ++i) {
          buf << i + 1 << sep << bps[i] << sep << to_fraction_string(schedule.value(bps[i])) << sep
              << to_fraction_string(ws[i]) << sep << to_decimal_string(ws[i]) << '\n';
        }
      }
    } else if (*sim) {
      ExperimentConfig cfg;
      cfg.radix = radix_flag();
      cfg.n = parse_count("--n", f.n);
      cfg.trials = parse_count("--trials", f.trials);
      cfg.master_seed = parse_count("--seed", f.seed);
      const Rational band = f.band.empty() ? Rational(33, 1000) : parse_flag_rational("band", f.band);
      const unsigned threads = f.threads.empty() ? 1U : static_cast<unsigned>(parse_count("--threads", f.threads));
      const auto summary = normality_experiment(cfg, band, threads);
      if (fmt == Format::kJson) {
        buf << summary_json(summary).dump(2) << '\n';
      } else if (fmt == Format::kCsv) {
        buf << "trial,seed,r,r_dec\n";
        for (std::size_t t = 0; t < summary.per_trial.size(); ++t) {
          buf << t << ',' << trial_seed(cfg.master_seed, t) << ',' << to_fraction_string(summary.per_trial[t]) << ','
              << to_decimal_string(summary.per_trial[t]) << '\n';
        }
      } else {
        buf << "rng               " << kRngId << '\n'
            << "base              " << cfg.radix.value() << '\n'
            << "n                 " << cfg.n << '\n'
            << "trials            " << cfg.trials << '\n'
            << "seed              " << cfg.master_seed << '\n'
            << "mean r_n          " << to_decimal_string(summary.mean) << '\n'
            << "stddev            " << to_decimal_string(Rational(summary.stddev), 17) << '\n'
            << "fraction in band  " << to_decimal_string(summary.fraction_in_band) << " (band "
            << to_fraction_string(band) << ")\n";
      }
    }
  } catch (const UsageError& e) {
    err << "error[usage]: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    err << "error[infeasible]: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    err << "error[domain]: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error[io]: " << e.what() << '\n';
    return 1;
  }

  if (f.out.empty()) {
    out << buf.str();
  } else {
    std::ofstream file(f.out, std::ios::binary);
    if (!file || !(file << buf.str())) {
      err << "error[io]: cannot write '" << f.out << "'\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace digitstat::cli
