#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
};

fs::path workdir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / ("bnlab_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun run(const std::string& args) {
  const fs::path out = workdir() / "stdout.txt";
  const std::string cmd = "cd " + workdir().string() + " && " + BNLAB_CLI + " " + args + " > " +
                          out.string() + " 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(out)};
}

}  // namespace

TEST(Cli, ConstantsFourThree) {
  const CliRun r = run("constants --n 4 --q 3");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["schema_version"], "1");
  EXPECT_NEAR(j["blowup_target"].get<double>(), 24.0, 1e-10);
  for (const char* k : {"alpha_N", "omega_N", "C_Nq", "alpha_Nq", "S_N2", "blowup_target"}) EXPECT_TRUE(j.contains(k)) << k;
}

TEST(Cli, RegimeGate) {
  EXPECT_EQ(run("constants --n 4 --q 2").code, 2);
  EXPECT_EQ(run("constants --n 3 --q 5").code, 0);
  EXPECT_EQ(run("constants --n 2 --q 3").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  std::ofstream(workdir() / "cfg.json") << R"({"n": 5, "q": 3.0})";
  const json a = json::parse(run("constants --config cfg.json").out);
  EXPECT_EQ(a["n"], 5);
  const json b = json::parse(run("constants --config cfg.json --n 4").out);
  EXPECT_EQ(b["n"], 4);
  EXPECT_NEAR(b["blowup_target"].get<double>(), 24.0, 1e-10);
}

TEST(Cli, SolveProfileAndDeterminism) {
  const CliRun a = run("solve --n 4 --q 3 --eps 0.05 --csv p1.csv");
  ASSERT_EQ(a.code, 0);
  const CliRun b = run("solve --n 4 --q 3 --eps 0.05 --csv p2.csv");
  EXPECT_EQ(a.out, b.out);
  const std::string csv = slurp(workdir() / "p1.csv");
  EXPECT_EQ(csv, slurp(workdir() / "p2.csv"));
  EXPECT_EQ(csv.rfind("r,u,du\n", 0), 0u);
  const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  EXPECT_NEAR(std::stod(last.substr(last.find(',') + 1)), 0.0, 1e-10);
  const json j = json::parse(a.out);
  EXPECT_LE(j["solution"]["pohozaev_residual"].get<double>(), 1e-6);
}

TEST(Cli, SolveArgumentErrors) {
  EXPECT_EQ(run("solve --n 4 --q 3").code, 2);
  EXPECT_EQ(run("solve --n 4 --q 3 --eps 0.1 --eps-tilde 0.1").code, 2);
  EXPECT_EQ(run("solve --n 3 --q 3 --eps 1.0").code, 2);
}

TEST(Cli, SweepOutputs) {
  const CliRun r = run("sweep --n 4 --q 3 --points 25 --jobs 1 --csv s.csv --no-certificates");
  ASSERT_EQ(r.code, 0);
  const std::string csv = slurp(workdir() / "s.csv");
  EXPECT_EQ(csv.rfind("eps_tilde,eps,mu,R_tilde,S_eps,blowup_product,deficit,profile_dist,"
                      "upper_bound_ratio,nehari_residual,pohozaev_residual\n", 0),
            0u);
  const json j = json::parse(r.out);
  const auto rows = std::count(csv.begin(), csv.end(), '\n') - 1;
  EXPECT_EQ(rows, 25 - static_cast<long>(j["failures"].size()));
  EXPECT_LE(j["blowup_fit"]["rel_error"].get<double>(), 0.05);
  EXPECT_NEAR(j["deficit_fit"]["slope_estimate"].get<double>(), 2.0, 0.2);
  EXPECT_TRUE(j["decomposition"].contains("fit"));
  EXPECT_TRUE(j["boundary_limit"].contains("points"));
  EXPECT_EQ(run("sweep --n 4 --q 3 --points 4").code, 2);
}

TEST(Cli, SweepJobsDoNotChangeBytes) {
  const CliRun a = run("sweep --n 5 --q 3 --points 8 --jobs 1 --csv j1.csv --ell-max 2 --n-grid 512");
  const CliRun b = run("sweep --n 5 --q 3 --points 8 --jobs 3 --csv j3.csv --ell-max 2 --n-grid 512");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(workdir() / "j1.csv"), slurp(workdir() / "j3.csv"));
  EXPECT_TRUE(json::parse(a.out)["nondegeneracy"].is_array());
}

TEST(Cli, VerifyPassesAndDetectsFault) {
  const CliRun good = run("verify");
  ASSERT_EQ(good.code, 0);
  const json j = json::parse(good.out);
  EXPECT_GE(j["checks"].size(), 12u);
  EXPECT_TRUE(j["all_pass"].get<bool>());
  EXPECT_EQ(run("verify --inject-green-fault").code, 1);
  EXPECT_EQ(run("verify --green-scale 1.01").code, 1);
}

TEST(Cli, UnreachableExitCode) { EXPECT_EQ(run("solve --n 4 --q 3 --eps 1e30 --csv u.csv").code, 3); }

TEST(Cli, BranchAllowsThreeThree) {
  const CliRun r = run("branch --n 3 --q 3 --points 21");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(json::parse(r.out)["has_fold"].get<bool>());
  EXPECT_EQ(run("branch --n 3 --q 2 --points 21").code, 2);
}

TEST(Cli, SpectrumAndDecompose) {
  const CliRun s = run("spectrum --n 5 --q 3 --eps-tilde 1e-2 --ell-max 2 --n-grid 512");
  ASSERT_EQ(s.code, 0);
  EXPECT_TRUE(json::parse(s.out)["certificate"]["nondegenerate"].get<bool>());
  const CliRun d = run("decompose --n 4 --q 3 --eps-tilde 1e-4");
  ASSERT_EQ(d.code, 0);
  EXPECT_NEAR(json::parse(d.out)["decomposition"]["alpha"].get<double>(), std::sqrt(8.0), 1e-2);
}
