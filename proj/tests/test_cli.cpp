#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "commands.hpp"
#include "fixtures.hpp"
#include "json.hpp"

using persuasion::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const char* name) { return fixtures::scenario_path(name); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "persuasion_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, FormatNumberAndGrid) {
  EXPECT_EQ(persuasion::cli::format_number(0.7), "0.7");
  EXPECT_EQ(persuasion::cli::format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(persuasion::cli::parse_grid("1.1:1.5:0.1"), (std::vector<double>{1.1, 1.2, 1.3, 1.4, 1.5}));
  EXPECT_EQ(persuasion::cli::parse_grid("0:1:1/3").size(), 4u);
  EXPECT_THROW(persuasion::cli::parse_grid("1:0:0.1"), std::invalid_argument);
  EXPECT_THROW(persuasion::cli::parse_grid("0:1:0"), std::invalid_argument);
  EXPECT_THROW(persuasion::cli::parse_grid("0:1"), std::invalid_argument);
}

TEST(Cli, OracleSellerBuyer) {
  const Outcome r = invoke({"oracle", scenario("seller_buyer.json"), "--horizon", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "t,adoption_exact,sender_utility_exact");
  EXPECT_EQ(rows[1], "1,1.000000000000,0.600000000000");
  EXPECT_EQ(rows[2], "2,0.700000000000,0.420000000000");
  EXPECT_EQ(rows[3].substr(0, 17), "3,0.580000000000,");
}

TEST(Cli, OracleNeverSwitchingStructures) {
  for (const char* file : {"speed_limit.json", "seller_buyer_full.json"}) {
    const Outcome r = invoke({"oracle", scenario(file), "--horizon", "8", "--alpha", "1.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      EXPECT_EQ(rows[i].substr(rows[i].find(',') + 1, 14), "1.000000000000") << file << " " << rows[i];
    }
  }
  const Outcome none = invoke({"oracle", scenario("seller_buyer.json"), "--structure", "none", "--horizon", "5"});
  EXPECT_EQ(lines(none.out).back(), "5,1.000000000000,0.000000000000");
}

TEST(Cli, OracleBudget) {
  const Outcome r = invoke({"oracle", scenario("seller_buyer.json"), "--horizon", "40", "--budget", "100"});
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.err.find("error[budget]"), std::string::npos);
}

TEST(Cli, UsageAndInvalidArguments) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"simulate"}).code, 2);
  EXPECT_EQ(invoke({"simulate", scenario("seller_buyer.json"), "--mode", "loose"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);

  const Outcome alpha = invoke({"simulate", scenario("seller_buyer.json"), "--alpha", "1"});
  EXPECT_EQ(alpha.code, 4);
  EXPECT_NE(alpha.err.find("error[invalid]"), std::string::npos);
  EXPECT_NE(alpha.err.find("alpha = 1"), std::string::npos);
  EXPECT_EQ(invoke({"oracle", scenario("seller_buyer.json"), "--alpha", "1"}).code, 4);
  EXPECT_EQ(invoke({"simulate", scenario("seller_buyer.json"), "--delta", "1.5"}).code, 4);
}

TEST(Cli, ParseAndIoErrors) {
  const auto broken = scratch("broken.json");
  std::ofstream(broken) << "{\n  \"states\": [\"H\", \"L\"],\n  \"actions\": \n}";
  const Outcome parse = invoke({"solve", broken.string()});
  EXPECT_EQ(parse.code, 3);
  EXPECT_NE(parse.err.find("error[parse]"), std::string::npos);
  EXPECT_NE(parse.err.find("line 4"), std::string::npos) << parse.err;

  const Outcome missing = invoke({"solve", "/nonexistent/x.json"});
  EXPECT_EQ(missing.code, 6);
  EXPECT_NE(missing.err.find("error[io]"), std::string::npos);
  EXPECT_EQ(invoke({"simulate", scenario("seller_buyer.json"), "--reps", "10", "--out", "/nonexistent/dir/x.csv"}).code,
            6);
}

TEST(Cli, SimulateIsDeterministic) {
  const std::vector<std::string> base{"simulate", scenario("seller_buyer.json"), "--reps", "1", "--seed", "7",
                                      "--horizon", "50"};
  const Outcome a = invoke(base);
  const Outcome b = invoke(base);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out).size(), 51u);

  auto one = base, four = base;
  one[3] = four[3] = "3000";
  one.insert(one.end(), {"--workers", "1"});
  four.insert(four.end(), {"--workers", "4"});
  EXPECT_EQ(invoke(one).out, invoke(four).out);
}

TEST(Cli, SimulateWritesSidecar) {
  const auto csv = scratch("run.csv");
  std::filesystem::remove(scratch("run.json"));
  const Outcome r = invoke({"simulate", scenario("seller_buyer.json"), "--reps", "500", "--horizon", "30", "--out",
                            csv.string(), "--delta", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(lines(slurp(csv)).front(), "t,adoption_estimate,adoption_stderr,period_sender_utility_estimate");
  ASSERT_TRUE(std::filesystem::exists(scratch("run.json")));
  const auto summary = nlohmann::json::parse(slurp(scratch("run.json")));
  EXPECT_EQ(summary["replications"], 500);
  EXPECT_EQ(summary["mode"], "strict");
  EXPECT_TRUE(summary["lifetime_utility"].contains("plug_in"));
  EXPECT_TRUE(summary["lifetime_utility"].contains("pathwise"));
  EXPECT_TRUE(summary["lifetime_utility"]["within_tail_tolerance"].get<bool>());
}

TEST(Cli, SolveReport) {
  const Outcome r = invoke({"solve", scenario("seller_buyer.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  EXPECT_EQ(report["bp_optimal"]["value"]["exact"], "3/5");
  EXPECT_EQ(report["bp_optimal"]["mu_star_exact"], "1/2");
  EXPECT_EQ(report["persistence"]["classification"], "SwitchRisk");
  EXPECT_NEAR(report["persistence"]["alpha_hat"].get<double>(), 1.4, 1e-12);
  EXPECT_NEAR(report["persistence"]["adoption_bound"].get<double>(), 0.5, 1e-12);

  const auto speed = nlohmann::json::parse(invoke({"solve", scenario("speed_limit.json")}).out);
  EXPECT_EQ(speed["persistence"]["classification"], "Persists");
  EXPECT_EQ(speed["persistence"]["reason"], "dominant_non_revealing_action");
  const auto all = nlohmann::json::parse(invoke({"solve", scenario("all_revealing.json")}).out);
  EXPECT_EQ(all["persistence"]["classification"], "EventuallyPersists");
  const auto high = nlohmann::json::parse(invoke({"solve", scenario("seller_buyer.json"), "--alpha", "2"}).out);
  EXPECT_TRUE(high["persistence"]["adoption_bound"].is_null());
}

TEST(Cli, SweepOutputs) {
  const Outcome r = invoke({"sweep", scenario("seller_buyer.json"), "--param", "alpha", "--grid", "1.1:1.5:0.2",
                            "--reps", "500", "--horizon", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0],
            "param_value,terminal_adoption,terminal_adoption_stderr,period_sender_utility,"
            "period_sender_utility_stderr");
  EXPECT_EQ(rows[1].substr(0, 4), "1.1,");
  EXPECT_EQ(rows[3].substr(0, 4), "1.5,");

  const Outcome eps = invoke({"sweep", scenario("seller_buyer.json"), "--param", "epsilon", "--grid", "0:1:0.5",
                              "--reps", "500", "--horizon", "20"});
  ASSERT_EQ(eps.code, 0) << eps.err;
  EXPECT_EQ(lines(eps.out).back().substr(0, 4), "1,1,");

  const Outcome bad = invoke({"sweep", scenario("speed_limit.json"), "--param", "epsilon", "--grid", "0:1:0.5"});
  EXPECT_EQ(bad.code, 4);
  EXPECT_NE(bad.err.find("error[invalid]"), std::string::npos);
}

TEST(Cli, ExecutableMatchesInProcess) {
  const std::string command = std::string(PERSUASION_BINARY) + " oracle " + scenario("seller_buyer.json") +
                              " --horizon 6 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string text;
  char buffer[512];
  while (std::fgets(buffer, sizeof buffer, pipe)) text += buffer;
  EXPECT_EQ(pclose(pipe), 0);
  EXPECT_EQ(text, invoke({"oracle", scenario("seller_buyer.json"), "--horizon", "6"}).out);

  FILE* failing = popen((std::string(PERSUASION_BINARY) + " simulate /nonexistent.json 2>/dev/null").c_str(), "r");
  ASSERT_NE(failing, nullptr);
  const int status = pclose(failing);
  EXPECT_EQ(WEXITSTATUS(status), 6);
}

TEST(Cli, EpsilonEndpointsMatchSimulate) {
  const std::vector<std::string> shared{"--reps", "2000", "--horizon", "30", "--seed", "5"};
  auto with = [&](std::vector<std::string> args) {
    args.insert(args.end(), shared.begin(), shared.end());
    return lines(invoke(args).out);
  };
  const auto sweep = with({"sweep", scenario("seller_buyer.json"), "--param", "epsilon", "--grid", "0:1:1"});
  const auto bp = with({"simulate", scenario("seller_buyer.json")});
  const auto full = with({"simulate", scenario("seller_buyer.json"), "--structure", "full"});
  ASSERT_EQ(sweep.size(), 3u);
  auto adoption = [](const std::string& row) {
    const auto first = row.find(',');
    const auto third = row.find(',', row.find(',', first + 1) + 1);
    return row.substr(first + 1, third - first - 1);
  };
  EXPECT_EQ(adoption(sweep[1]), adoption(bp.back()));
  EXPECT_EQ(adoption(sweep[2]), adoption(full.back()));
}

TEST(Cli, SpeedLimitAdoptionColumnIsOne) {
  for (const char* alpha : {"1.01", "1.39", "4"}) {
    const auto rows = lines(invoke({"simulate", scenario("speed_limit.json"), "--alpha", alpha, "--reps", "500",
                                    "--horizon", "40"})
                                .out);
    ASSERT_EQ(rows.size(), 41u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      EXPECT_EQ(rows[i].substr(rows[i].find(',') + 1, 4), "1,0,") << alpha << " " << rows[i];
    }
  }
}
