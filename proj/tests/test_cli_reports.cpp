#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

#include "geodet/report.hpp"

using namespace geodet;
using nlohmann::json;

namespace {

RunConfig config(Command c, std::map<std::string, std::string> params, Format f = Format::Json) {
  RunConfig cfg;
  cfg.command = c;
  cfg.parameters = std::move(params);
  cfg.format = f;
  return cfg;
}

struct Process {
  int status;
  std::string out;
};

Process shell(const std::string& args) {
  const std::string cmd = std::string(GEODET_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST(Run, FredholmJsonSchema) {
  const RunResult r = run(config(Command::DetFredholm, {{"kappa", "1"}, {"r", "1.5707963"}, {"n", "3"}}));
  ASSERT_EQ(r.exit_code, 0);
  const json j = json::parse(r.output);
  for (const char* key : {"command", "inputs", "value", "error_estimate", "route", "series"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["command"], "det-fredholm");
  EXPECT_NEAR(j["value"].get<double>(), 0.4052847, 1e-7);
  EXPECT_EQ(j["series"].size(), 4u);
}

TEST(Run, ZetaLaplacian) {
  const RunResult r = run(config(Command::DetZeta, {{"case", "laplacian"}, {"t", "1"}, {"n", "3"}}));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(json::parse(r.output)["value"].get<double>(), 8.0);
}

TEST(Run, GyDegenerateRoute) {
  const RunResult r = run(config(Command::DetGy, {{"kappa", "1"}, {"r", "3.141592653589793"}, {"n", "2"}}));
  ASSERT_EQ(r.exit_code, 0);
  const json j = json::parse(r.output);
  EXPECT_EQ(j["route"], "gelfand-yaglom-degenerate");
  EXPECT_NEAR(j["value"].get<double>(), 1.0 / (2.0 * std::numbers::pi * std::numbers::pi), 1e-9);
}

TEST(Run, ModuleErrorIsNamed) {
  const RunResult r = run(config(Command::DetFredholm, {{"kappa", "1"}, {"r", "3.141592653589793"}, {"n", "2"}}));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(json::parse(r.output)["error"], "degenerate-operator");
}

TEST(Run, MissingOrMalformedParameterIsUsageError) {
  EXPECT_EQ(run(config(Command::DetGy, {{"kappa", "1"}, {"n", "2"}})).exit_code, 2);
  EXPECT_EQ(run(config(Command::DetGy, {{"kappa", "abc"}, {"r", "1"}, {"n", "2"}})).exit_code, 2);
  EXPECT_EQ(run(config(Command::DetGy, {{"kappa", "inf"}, {"r", "1"}, {"n", "2"}})).exit_code, 2);
  EXPECT_EQ(run(config(Command::DetGy, {{"kappa", "1"}, {"r", "1"}, {"n", "2.5"}})).exit_code, 2);
}

TEST(Run, ReportsAreByteStable) {
  const auto cfg = config(Command::DetGy, {{"kappa", "-0.3"}, {"r", "0.5"}, {"n", "3"}});
  EXPECT_EQ(run(cfg).output, run(cfg).output);
}

TEST(Run, ValidateReportIsByteStable) {
  const auto cfg = config(Command::Validate, {});
  const RunResult first = run(cfg);
  EXPECT_EQ(first.output, run(cfg).output);
  EXPECT_TRUE(json::parse(first.output).contains("summary"));
}

TEST(Run, CsvAndTextFormats) {
  const auto csv = run(config(Command::DetFredholm, {{"kappa", "-1"}, {"r", "1"}, {"n", "2"}}, Format::Csv));
  EXPECT_EQ(csv.output.substr(0, csv.output.find('\n')), "level,value,tail_correction,extrapolated");
  const auto text = run(config(Command::DetZeta, {{"t", "0.5"}, {"n", "2"}}, Format::Text));
  EXPECT_NE(text.output.find("value: 1"), std::string::npos);
}

TEST(Run, EvalJacobianFlat) {
  const RunResult r = run(config(Command::EvalJacobian, {{"kappa", "0"}, {"r", "1"}, {"n", "2"}, {"partition-N", "8"}}));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(json::parse(r.output)["value"].get<double>(), 1.0);
}

TEST(Cli, NoArgumentsIsUsage) {
  EXPECT_EQ(shell("").status, 2);
}

TEST(Cli, UnknownCommandIsUsage) { EXPECT_EQ(shell("frobnicate").status, 2); }

TEST(Cli, FlagsOverrideConfigFile) {
  const std::string path = testing::TempDir() + "geodet_cli_config.toml";
  {
    std::ofstream f(path);
    f << "kappa = -1\nr = 1\nn = 2\n";
  }
  const Process from_file = shell("det-fredholm --config " + path);
  ASSERT_EQ(from_file.status, 0);
  EXPECT_NEAR(json::parse(from_file.out)["value"].get<double>(), std::sinh(1.0), 1e-8);
  const Process overridden = shell("det-fredholm --config " + path + " --n 3");
  ASSERT_EQ(overridden.status, 0);
  EXPECT_NEAR(json::parse(overridden.out)["value"].get<double>(), std::sinh(1.0) * std::sinh(1.0), 1e-8);
  std::remove(path.c_str());
}

TEST(Cli, OutputFile) {
  const std::string path = testing::TempDir() + "geodet_cli_out.json";
  ASSERT_EQ(shell("det-zeta --case laplacian --t 1 --n 3 --out " + path).status, 0);
  std::ifstream f(path);
  const json j = json::parse(f);
  EXPECT_EQ(j["value"].get<double>(), 8.0);
  std::remove(path.c_str());
}

TEST(Validation, RecordInvariant) {
  ValidationRecord r{"x", 100.0, 100.5, 0.01, Comparison::Equal, false, 0.0};
  EXPECT_TRUE(evaluate(r));
  r.computed = 102.0;
  EXPECT_FALSE(evaluate(r));
  r = {"y", 0.0, 0.5e-3, 1e-3, Comparison::Equal, false, 0.0};
  EXPECT_TRUE(evaluate(r));
}

TEST(Validation, NamedRecordsPresent) {
  CriterionResult c3 = run_criterion(3);
  bool found = false;
  for (const auto& r : c3.records) {
    if (r.check_name == "identity-chain-kappa1-r1.0-n2") {
      found = true;
      EXPECT_DOUBLE_EQ(r.tolerance, 1e-5);
    }
  }
  EXPECT_TRUE(found);
  CriterionResult c9 = run_criterion(9);
  found = false;
  for (const auto& r : c9.records) {
    if (r.check_name == "antipodal-S2-coefficient") {
      found = true;
      EXPECT_NEAR(r.expected, 2.0 * std::numbers::pi * std::numbers::pi, 1e-12);
    }
  }
  EXPECT_TRUE(found);
}
