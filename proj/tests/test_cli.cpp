#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "kszlab/ksz.hpp"

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(KSZLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), got);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("kszlab_cli_test_" + name);
}

}  // namespace

TEST(Cli, ConstantsReportsEveryField) {
  const auto r = run("constants -d 2 -p inf,inf -n 4,4");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["gamma"], 2.0);
  EXPECT_NEAR(j["C_d"].get<double>(), 8.0 * std::sqrt(2.0 * std::log(9.0)), 1e-12);
  for (const char* key : {"R", "lambda", "bound", "xi_constant"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST(Cli, ConstantsOneVariable) {
  const auto r = run("constants -d 1 -p 2 -n 1");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["gamma"], 2.0);
  EXPECT_NEAR(j["bound"].get<double>(), j["C_d"].get<double>(), 1e-12);
}

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("constants -d 2 -p inf,inf").code, 2);
  EXPECT_EQ(run("constants -d 3 -p inf,inf -n 4,4").code, 2);
  EXPECT_EQ(run("constants -p abc -n 4").code, 2);
  EXPECT_EQ(run("norm -p 2,2").code, 2);
  EXPECT_EQ(run("window -n 3,3 -p inf,inf --format xml").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, ExhaustionExitsWithThree) {
  EXPECT_EQ(run("sample -n 4,4 -p inf,inf --target-fraction 0.02 --max-draws 3").code, 3);
  EXPECT_EQ(run("window -n 5,5 -p inf,inf --exhaustive").code, 3);
  EXPECT_EQ(run("window -n 3,3,3 -p 4,4,4").code, 3);
}

TEST(Cli, SampleIsByteIdenticalAcrossRuns) {
  const auto a = run("sample -n 4,4 -p inf,inf --seed 7");
  const auto b = run("sample -n 4,4 -p inf,inf --seed 7");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_LE(j["norm_report"]["upper"].get<double>(), j["threshold"].get<double>());
}

TEST(Cli, NormOfHadamardFile) {
  const auto path = temp_file("hadamard.json");
  std::ofstream(path) << R"({"dims":[2,2],"signs":"4A=="})";
  const auto r = run("norm --tensor " + path.string() + " -p 2,2");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["lower"].get<double>(), std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(j["upper"].get<double>(), std::sqrt(2.0), 1e-9);
  std::filesystem::remove(path);
}

TEST(Cli, HlVerdictAndBlowUp) {
  const auto r = run("hl --rho 1,1 -p inf,inf -d 2");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["verdict"]["admissible"], false);
  EXPECT_EQ(j["verdict"]["worst_subset"], nlohmann::json::array({1, 2}));
  EXPECT_EQ(j["blow_up_exponent"], 0.5);

  const auto lhs = nlohmann::json::parse(run("hl --rho 2,1 -p inf,inf -n 4,9 --seed 3").out);
  EXPECT_NEAR(lhs["hl_lhs"].get<double>(), 2.0 * 9.0, 1e-12);

  const auto blocks = nlohmann::json::parse(run("hl --rho 1 -p 4,4 --blocks 2").out);
  EXPECT_EQ(blocks["verdict"]["admissible"], false);
  EXPECT_TRUE(blocks["blow_up_exponent"].is_null());
}

TEST(Cli, OutputFileMatchesStdout) {
  const auto path = temp_file("window.csv");
  const std::string args = "window -n 3,3 -p inf,inf --trials 10 --seed 2";
  const auto direct = run(args);
  ASSERT_EQ(run(args + " -o " + path.string()).code, 0);
  std::ifstream in(path);
  const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(written, direct.out);
  std::filesystem::remove(path);
}

TEST(Cli, SweepJsonCarriesSlope) {
  const auto r = run("sweep -p inf,inf --rho 1,1 -n 2,4,8,16 --format json");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["rows"].size(), 4u);
  EXPECT_NEAR(j["slope"].get<double>(), 0.5, 0.1);
  const auto csv = run("sweep -p inf,inf --rho 1,1 -n 2,4");
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "d,n,rho_list,p_list,hl_lhs,ksz_bound,ratio");
}

TEST(Cli, WorkersDoNotChangeOutput) {
  for (const std::string args : {"window -n 4,4 -p inf,inf --trials 40 --seed 5",
                                 "norm -n 4,4,4 -p 3,3,3 --seed 9 --restarts 8",
                                 "sweep -p inf,inf --rho 1,2 -n 2,3,4 --trials 2"}) {
    const auto one = run(args + " --workers 1");
    const auto three = run(args + " --workers 3");
    ASSERT_EQ(one.code, 0) << args;
    EXPECT_EQ(one.out, three.out) << args;
  }
}

TEST(Cli, EverySubcommandHasFormulaHelp) {
  const std::vector<std::pair<std::string, std::string>> expected{
      {"constants", "C_d"}, {"sample", "2 sqrt(2) R"}, {"norm", "sup |sum_j"},
      {"window", "1/(d 2^{(d-1)/2})"}, {"hl", "(|I|+1)/2"}, {"sweep", "slope"}};
  for (const auto& [cmd, needle] : expected) {
    const auto r = run(cmd + " --help");
    EXPECT_EQ(r.code, 0) << cmd;
    EXPECT_NE(r.out.find(needle), std::string::npos) << cmd;
  }
}
