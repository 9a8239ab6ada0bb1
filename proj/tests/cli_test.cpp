#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "digitstat/cli.hpp"

namespace digitstat::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& input = "") {
  std::ostringstream out, err;
  std::istringstream in(input);
  const int code = run_cli(args, out, err, in);
  return {code, out.str(), err.str()};
}

TEST(Cli, DigitsTable) {
  const auto r = run({"digits", "--base", "3", "--rational", "1/4", "--count", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0.(02)_3\n020202\n");
}

TEST(Cli, DigitsAcceptsDecimalLiteral) {
  const auto r = run({"digits", "--base", "10", "--rational", "0.2", "--count", "3", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["rational"], "1/5");
  EXPECT_EQ(j["expansion"], "0.2(0)_10");
  EXPECT_EQ(j["digits"], "200");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({"digits", "--base", "3"}).code, 2);
  EXPECT_EQ(run({"digits", "--base", "3", "--rational", "1/4", "--bogus"}).code, 2);
  const auto bad = run({"digits", "--base", "3", "--rational", "one/4"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(bad.err.rfind("error[usage]: ", 0), 0U) << bad.err;
  EXPECT_EQ(std::count(bad.err.begin(), bad.err.end(), '\n'), 1);
  EXPECT_EQ(run({"digits", "--base", "1", "--rational", "1/4"}).code, 2);
  EXPECT_EQ(run({"construct-freq", "--a", "1/3", "--tau", "1/2,1/2", "--count", "5"}).code, 2);
  EXPECT_EQ(run({"stats", "--base", "3", "--checkpoints", "geometric:1,2"}, "012").code, 2);
  EXPECT_EQ(run({"digits", "--base", "3", "--rational", "1/4", "--format", "xml"}).code, 2);
}

TEST(Cli, DomainErrorsExitOne) {
  const auto r = run({"digits", "--base", "3", "--rational", "3/2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error[domain]: ", 0), 0U);
  EXPECT_EQ(run({"stats", "--base", "2"}, "0120").code, 1);
  EXPECT_EQ(run({"construct-freq", "--a", "2/3", "--b", "2/3", "--count", "5"}).code, 1);
}

TEST(Cli, InfeasibleThetaExitsOne) {
  for (const char* theta : {"0", "2"}) {
    const auto r = run({"construct-mean-nofreq", "--theta", theta, "--x1", "1/5", "--x2", "2/5", "--eps", "1/20",
                        "--blocks", "10"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error[infeasible]: ", 0), 0U) << r.err;
    EXPECT_NE(r.err.find("(0,2)"), std::string::npos) << r.err;
  }
}

TEST(Cli, StatsFromStdinCsv) {
  const auto r = run({"stats", "--base", "3", "--checkpoints", "list:3,6", "--format", "csv"}, "012\n 012\n");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, row3, row6;
  std::getline(lines, header);
  std::getline(lines, row3);
  std::getline(lines, row6);
  EXPECT_EQ(header, "n,N0,N1,N2,v0,v1,v2,r,v0_dec,v1_dec,v2_dec,r_dec");
  EXPECT_EQ(row3.substr(0, 30), "3,1,1,1,1/3,1/3,1/3,1/1,0.3333");
  EXPECT_EQ(row6.substr(0, 30), "6,2,2,2,1/3,1/3,1/3,1/1,0.3333");
}

TEST(Cli, StatsFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "digitstat_cli_test_digits.txt";
  {
    std::ofstream f(path);
    f << "0100110000";
  }
  const auto r = run({"stats", "--base", "2", path.string(), "--checkpoints", "list:10", "--format", "json"});
  std::filesystem::remove(path);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["rows"][0]["r"]["exact"], "3/10");
  EXPECT_EQ(run({"stats", "--base", "2", "/nonexistent/digits.txt"}).code, 1);
}

TEST(Cli, ConstructFreqBothMethods) {
  EXPECT_EQ(run({"construct-freq", "--a", "1/2", "--b", "1/2", "--count", "8"}).out, "01010101\n");
  EXPECT_EQ(run({"construct-freq", "--tau", "1/3,1/3,1/3", "--count", "6"}).out, "012012\n");
  const auto stats = run({"construct-freq", "--tau", "1/2,1/4,1/4", "--count", "1000", "--emit", "stats",
                          "--checkpoints", "list:1000", "--format", "json"});
  ASSERT_EQ(stats.code, 0) << stats.err;
  EXPECT_EQ(nlohmann::json::parse(stats.out)["rows"][0]["r"]["exact"], "3/4");
}

TEST(Cli, ConstructMeanNoFreqBlocksCsv) {
  const auto r = run({"construct-mean-nofreq", "--theta", "1", "--x1", "0.2", "--x2", "0.4", "--eps", "0.05",
                      "--blocks", "3", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "k,a_k1,a_k2,a_k3,alpha_k\n1,0,0,0,1/5\n2,0,0,0,2/5\n3,1,0,1,2/5\n");
  const auto digits = run({"construct-mean-nofreq", "--theta", "1", "--x1", "1/5", "--x2", "2/5", "--eps", "1/20",
                           "--blocks", "3", "--emit", "digits"});
  EXPECT_EQ(digits.out, "02\n");
}

TEST(Cli, NoMeanExampleDigitsAndStats) {
  EXPECT_EQ(run({"no-mean-example", "--count", "14"}).out, "01001100001111\n");
  const auto r = run({"no-mean-example", "--count", "10", "--emit", "stats", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = nlohmann::json::parse(r.out)["rows"];
  EXPECT_EQ(rows.back()["n"], 10);
  EXPECT_EQ(rows.back()["r"]["exact"], "3/10");
}

TEST(Cli, Lemma2AndSchedule) {
  const auto w = run({"lemma2", "--rational", "1/2", "--n", "4", "--format", "csv"});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_NE(w.out.find("4,1,2/5,"), std::string::npos) << w.out;
  EXPECT_NE(w.out.find(",ok"), std::string::npos);
  EXPECT_EQ(run({"lemma2", "--rational", "1/2", "--n", "4", "--k", "5"}).code, 1);

  const auto s = run({"schedule", "--x1", "1/5", "--x2", "2/5", "--eps", "1/20", "--n", "100", "--format", "json"});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto j = nlohmann::json::parse(s.out);
  EXPECT_EQ(j["breakpoints"][0]["n"], 1);
  EXPECT_EQ(j["breakpoints"][0]["value"], "1/5");
}

TEST(Cli, SimulateJsonIsDeterministic) {
  const std::vector<std::string> args{"simulate", "--base", "3", "--n", "10000", "--trials", "20", "--seed", "42",
                                      "--format", "json"};
  const auto a = run(args);
  const auto b = run(args);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "4"});
  const auto c = run(threaded);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["rng_id"], "splitmix64-ctr/v1");
  EXPECT_EQ(j["per_trial"].size(), 20U);
}

TEST(Cli, OutFlagWritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "digitstat_cli_out.txt";
  const auto r = run({"digits", "--base", "3", "--rational", "5/6", "--count", "4", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::stringstream content;
  content << f.rdbuf();
  std::filesystem::remove(path);
  EXPECT_EQ(content.str(), "0.2(1)_3\n2111\n");
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

}  // namespace
}  // namespace digitstat::cli
