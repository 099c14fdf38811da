#include "aoi/cli.hpp"
#include "aoi/report.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"aoi"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = aoi::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s, const std::string& prefix) {
  std::istringstream is(s);
  std::size_t n = 0;
  for (std::string line; std::getline(is, line);)
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

} // namespace

TEST(Cli, ClosedFormPrintsTheValue) {
  const auto r = run({"closed-form", "--model", "mm12-ps", "--lambda", "1", "--mu", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "2.5\n");
}

TEST(Cli, ClosedFormRangeIsACsv) {
  const auto r = run({"closed-form", "--model", "mm11star", "--lambda", "1:3:3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.starts_with("# config: "));
  EXPECT_TRUE(contains(r.out, "model,lambda,mu,aaoi\n"));
  EXPECT_TRUE(contains(r.out, "mm11star,2,1,1.5\n"));
}

TEST(Cli, UsageErrors) {
  auto r = run({"closed-form", "--model", "mm99", "--lambda", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "mm12star2-ps"));
  r = run({"closed-form", "--model", "mm11", "--lambda", "-2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "> 0"));
  r = run({"closed-form", "--model", "mm1-fgfs", "--lambda", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "rho"));
  r = run({});
  EXPECT_EQ(r.code, 2);
  r = run({"verify", "--prop", "p99"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "lemma1"));
  r = run({"simulate", "--model", "mm11", "--lambda", "1", "--events", "10", "--time", "5"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, HelpListsModelsAndPropositions) {
  for (const char* sub : {"closed-form", "verify", "sweep"}) {
    const auto r = run({sub, "--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(contains(r.out, "mm12star2-fgfs")) << sub;
    EXPECT_TRUE(contains(r.out, "p11")) << sub;
    EXPECT_TRUE(contains(r.out, "conj1")) << sub;
  }
}

TEST(Cli, VerifyReportsTheMaximum) {
  const auto r = run({"verify", "--prop", "p8"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "prop,rho,ratio,lower,upper,pass\n"));
  EXPECT_EQ(count_lines(r.out, "p8,"), 200u);
  EXPECT_TRUE(contains(r.out, "# result: p8 pass"));
  EXPECT_TRUE(contains(r.out, "rho_star=2.3943"));
  EXPECT_TRUE(contains(r.out, "max=1.07306"));
}

TEST(Cli, VerifyFailsWhenABoundIsViolated) {
  // With a truncation too small to converge the conjecture check cannot pass.
  const auto r = run({"verify", "--prop", "conj1", "--grid", "0.9", "--start-n", "4", "--step-n", "4", "--max-n", "8"});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, Extremum) {
  const auto r = run({"extremum", "--prop", "p11"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "p11,0.4697"));
  EXPECT_TRUE(contains(r.out, ",min,true\n"));
}

TEST(Cli, ShsSolveAndDump) {
  auto r = run({"shs", "--model", "mm12star-ps", "--lambda", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "mm12star-ps,1,0,1,1,0,2.20833333333,2.20833333333,"));
  r = run({"shs", "--model", "mm11", "--lambda", "1", "--dump"});
  EXPECT_EQ(r.out, "l,rate,from,to,reset\n0,1,0,1,[x0,x1]->[x0,0]\n1,1,1,0,[x0,x1]->[x1,0]\n2,1,1,1,[x0,x1]->[x0,x1]\n");
  r = run({"shs", "--model", "mm1-ps", "--lambda", "0.1", "--lambda2", "0.001", "--buffer", "8"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, ",11.0063484"));
  r = run({"shs", "--model", "mm12-ps", "--lambda", "1", "--lambda2", "1"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, SimulateIsByteDeterministic) {
  const auto a = run({"simulate", "--model", "mm12-ps", "--lambda", "1", "--events", "20000", "--reps", "5", "--seed", "9"});
  const auto b = run({"simulate", "--model", "mm12-ps", "--lambda", "1", "--events", "20000", "--reps", "5", "--seed", "9"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(contains(a.out, "# config: seed=9\n"));
  EXPECT_TRUE(contains(a.out, "model,lambda1,lambda2,mu,source,mean_age,ci95,seed,events\n"));
  EXPECT_TRUE(contains(a.out, "mm12-ps,1,0,1,1,"));
}

TEST(Cli, SeedFromEnvironmentIsOverriddenByFlag) {
  ::setenv("AOI_SEED", "77", 1);
  const auto env = run({"simulate", "--model", "mm11", "--lambda", "1", "--events", "5000", "--reps", "3"});
  const auto flag = run({"simulate", "--model", "mm11", "--lambda", "1", "--events", "5000", "--reps", "3", "--seed", "5"});
  ::setenv("AOI_SEED", "not-a-number", 1);
  const auto bad = run({"simulate", "--model", "mm11", "--lambda", "1", "--events", "5000", "--reps", "3"});
  const auto bad_but_flag =
      run({"simulate", "--model", "mm11", "--lambda", "1", "--events", "5000", "--reps", "3", "--seed", "5"});
  ::unsetenv("AOI_SEED");
  EXPECT_TRUE(contains(env.out, "# config: seed=77\n"));
  EXPECT_TRUE(contains(flag.out, "# config: seed=5\n"));
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(bad_but_flag.out, flag.out);
}

TEST(Cli, SimulateWritesATrace) {
  const auto dir = std::filesystem::temp_directory_path() / "aoi_cli_test";
  std::filesystem::create_directories(dir);
  const std::string trace = (dir / "trace.csv").string();
  const std::string est = (dir / "est.csv").string();
  const auto r = run({"simulate", "--model", "mm11star", "--lambda", "1", "--events", "2000", "--reps", "2", "--trace",
                      trace.c_str(), "--trace-points", "100", "--out", est.c_str()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "");
  std::ifstream tf(trace);
  std::stringstream ts;
  ts << tf.rdbuf();
  EXPECT_TRUE(contains(ts.str(), "time,age,source\n"));
  EXPECT_EQ(count_lines(ts.str(), "#") + 1 + 100, count_lines(ts.str(), ""));
  std::ifstream ef(est);
  std::stringstream es;
  es << ef.rdbuf();
  EXPECT_TRUE(contains(es.str(), "mm11star,1,0,1,1,"));
  std::filesystem::remove_all(dir);
}

TEST(Cli, SweepCsv) {
  const auto r = run({"sweep", "--lambda1", "0.1", "--lambda2", "0.001:0.05:4", "--models", "ps,fgfs,mm11star",
                      "--objective", "source1", "--method", "shs"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.starts_with("# config: command=sweep\n"));
  EXPECT_TRUE(contains(r.out, "lambda2,model,objective,aaoi,method,ci95\n"));
  EXPECT_EQ(count_lines(r.out, "0."), 12u);
  EXPECT_TRUE(contains(r.out, "0.001,mm11star,source1,11.01,shs,0\n"));
}

TEST(Cli, SweepNotesOverload) {
  const auto r = run({"sweep", "--lambda1", "5", "--lambda2", "1000", "--models", "ps", "--buffer", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "# note: total load >= 1"));
}

TEST(Cli, Conjecture) {
  const auto r = run({"conjecture", "--rho", "0.2:0.4:2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(count_lines(r.out, "0."), 2u);
  EXPECT_TRUE(contains(r.out, "rho,aaoi,c,lower,upper,"));
}

TEST(Report, Ranges) {
  using aoi::report::parse_range;
  EXPECT_EQ(parse_range("0.5"), std::vector<double>{0.5});
  const auto lin = parse_range("0.001:0.05:50");
  ASSERT_EQ(lin.size(), 50u);
  EXPECT_EQ(lin.front(), 0.001);
  EXPECT_EQ(lin.back(), 0.05);
  const auto lg = parse_range("log:1e-3:1e3:7");
  ASSERT_EQ(lg.size(), 7u);
  EXPECT_NEAR(lg[3], 1.0, 1e-15);
  EXPECT_THROW(parse_range("1:2"), std::invalid_argument);
  EXPECT_THROW(parse_range("1:2:0"), std::invalid_argument);
  EXPECT_THROW(parse_range("1:2:2.5"), std::invalid_argument);
  EXPECT_THROW(parse_range("2:1:3"), std::invalid_argument);
  EXPECT_THROW(parse_range("abc"), std::invalid_argument);
  EXPECT_THROW(parse_range("log:0:1:3"), std::invalid_argument);
}

TEST(Report, Numbers) {
  using aoi::report::num;
  EXPECT_EQ(num(2.5), "2.5");
  EXPECT_EQ(num(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(num(1e-7), "1e-07");
  EXPECT_EQ(num(std::numeric_limits<double>::infinity()), "inf");
}
