#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "eigenpath/harness/matrix_io.hpp"

using nlohmann::json;
namespace hx = eigenpath::harness;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(EIGENPATH_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("eigenpath_cli_" + name)).string();
}

std::string write_diagonal(const std::string& name, std::initializer_list<double> d) {
  eigenpath::ComplexMatrix a = eigenpath::ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                                                              static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) a(i, i) = x, ++i;
  const std::string path = temp_path(name);
  hx::write_file(path, hx::matrix_to_json(a).dump());
  return path;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  EXPECT_EQ(run("solve-one").code, 2);
  EXPECT_EQ(run("solve-one --n 4").code, 2);
  EXPECT_EQ(run("solve-one --n 1 --seed 1").code, 2);
  EXPECT_EQ(run("bench --experiment q --seed 1").code, 2);
  EXPECT_EQ(run("solve-one --input /nonexistent/matrix.json").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, SolveOneDiagonal) {
  const std::string input = write_diagonal("diag21.json", {2.0, 1.0});
  const CliRun r = run("solve-one --input " + input);
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["zeta"][0].get<double>(), 2.0, 1e-8);
  EXPECT_NEAR(j["zeta"][1].get<double>(), 0.0, 1e-8);
  EXPECT_LE(j["residual"].get<double>(), 1e-8);
  std::filesystem::remove(input);
}

TEST(Cli, SolveOneGaussianWithTrace) {
  const std::string trace = temp_path("trace.json");
  const CliRun r = run("solve-one --n 5 --seed 3 --out " + trace);
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_LE(j["residual"].get<double>(), 1e-6);
  const json t = json::parse(hx::read_file(trace));
  EXPECT_EQ(t["n"], 5);
  EXPECT_EQ(t["seed"], 3);
  EXPECT_EQ(t["steps"], j["steps"]);
  EXPECT_EQ(t["per_step"].size(), t["steps"].get<std::size_t>());
  std::filesystem::remove(trace);
  // Same seed, same answer.
  EXPECT_EQ(run("solve-one --n 5 --seed 3").out, r.out);
}

TEST(Cli, SolveAllDiagonal) {
  const std::string input = write_diagonal("diag59.json", {5.0, 9.0});
  const CliRun r = run("solve-all --input " + input);
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["distinct"].get<bool>());
  ASSERT_EQ(j["pairs"].size(), 2u);
  std::vector<double> re;
  for (const auto& p : j["pairs"]) re.push_back(p["zeta"][0].get<double>());
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], 5.0, 1e-8);
  EXPECT_NEAR(re[1], 9.0, 1e-8);
  std::filesystem::remove(input);
}

TEST(Cli, SolveAllIdentityFails) {
  const std::string input = write_diagonal("identity.json", {1.0, 1.0, 1.0});
  EXPECT_EQ(run("solve-all --input " + input).code, 3);
  EXPECT_EQ(run("solve-all --input " + input + " --max-steps 10").code, 4);
  std::filesystem::remove(input);
}

TEST(Cli, SolveRandom) {
  const CliRun r = run("solve-random --n 4 --seed 9");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_LE(j["residual"].get<double>(), 1e-6);
  EXPECT_EQ(j["start_residual"].get<double>(), 0.0);
  EXPECT_GE(j["proposals"].get<int>(), 1);
}

TEST(Cli, Refine) {
  const CliRun r = run("refine --n 6 --seed 4 --epsilon 1e-8");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_LE(j["residual"].get<double>(), 1e-12);
  EXPECT_GE(j["iterations"].get<int>(), 1);
  EXPECT_EQ(run("refine --n 6 --seed 4 --epsilon 0.7").code, 2);

  const std::string input = write_diagonal("diag12.json", {1.0, 2.0});
  const std::string pair = temp_path("pair.json");
  hx::write_file(pair, R"({"zeta": [1.01, 0.0], "w": [[1.0, 0.0], [0.01, 0.0]]})");
  const CliRun p = run("refine --input " + input + " --pair " + pair + " --epsilon 1e-10");
  ASSERT_EQ(p.code, 0);
  EXPECT_NEAR(json::parse(p.out)["zeta"][0].get<double>(), 1.0, 1e-10);
  std::filesystem::remove(input);
  std::filesystem::remove(pair);
}

TEST(Cli, BenchCsvIsReproducible) {
  const std::string a = temp_path("bench_a.csv");
  const std::string b = temp_path("bench_b.csv");
  const CliRun r1 = run("bench --experiment c --n 3,4 --trials 50 --seed 7 --format csv --jobs 1 --out " + a);
  const CliRun r2 = run("bench --experiment c --n 3,4 --trials 50 --seed 7 --format csv --jobs 2 --out " + b);
  ASSERT_EQ(r1.code, 0);
  ASSERT_EQ(r2.code, 0);
  const std::string ca = hx::read_file(a);
  EXPECT_EQ(ca, hx::read_file(b));
  EXPECT_EQ(ca.rfind("trial,n,pinv_frobenius2,ok", 0), 0u);
  const json report = json::parse(r1.out);
  EXPECT_EQ(report["config"]["seed"], 7);
  EXPECT_TRUE(report["metrics"].contains("3"));
  EXPECT_EQ(run("bench --experiment c --n 3 --trials 5").code, 2);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}
