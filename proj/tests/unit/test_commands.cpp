#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "fjmgt/cli/commands.hpp"

using namespace fjmgt;
using namespace fjmgt::cli;

namespace {

std::string fixture(const std::string& name) { return std::string(FJMGT_FIXTURE_DIR) + "/" + name; }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("fjmgt_cmd_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
    unsetenv("FJMGT_OUTPUT_DIR");
    unsetenv("FJMGT_WORKERS");
  }
  void TearDown() override {
    std::filesystem::remove_all(dir_);
    unsetenv("FJMGT_OUTPUT_DIR");
    unsetenv("FJMGT_WORKERS");
  }
  std::string dir(const std::string& sub = "") const { return (dir_ / sub).string(); }

  int run_cli(const std::string& args) const {
    const std::string cmd = std::string(FJMGT_CLI_BINARY) + " " + args + " > " + dir("stdout.txt") + " 2> " +
                            dir("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(CommandsTest, SimulateLinearFixture) {
  const auto outcome = simulate(load_config(fixture("linear_mode1.ini")), {dir(), std::nullopt});
  EXPECT_EQ(outcome.exit_code, kExitOk);
  EXPECT_EQ(outcome.result.status, dynamics::Status::Completed);
  EXPECT_DOUBLE_EQ(outcome.n0, 6.0);
  const auto csv = read_file(outcome.data_path);
  std::istringstream lines(csv);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  EXPECT_EQ(header, diagnostics::csv_header());
  EXPECT_EQ(first.substr(0, 4), "0,2,");
  EXPECT_EQ(outcome.result.records.front().energy, 2.0);
  EXPECT_EQ(outcome.result.records.size(), 11u);
  const auto status = read_file(outcome.status_path);
  EXPECT_NE(status.find("\"schema_version\":1"), std::string::npos);
  EXPECT_NE(status.find("\"status\":\"Completed\""), std::string::npos);
}

TEST_F(CommandsTest, SimulateIsByteDeterministic) {
  const auto config = load_config(fixture("linear_mode1.ini"));
  const auto a = simulate(config, {dir("a"), std::nullopt});
  const auto b = simulate(config, {dir("b"), std::nullopt});
  EXPECT_EQ(read_file(a.data_path), read_file(b.data_path));
}

TEST_F(CommandsTest, NdjsonOutput) {
  auto config = load_config(fixture("linear_mode1.ini"));
  config.output.format = OutputFormat::Ndjson;
  const auto o = simulate(config, {dir(), std::nullopt});
  EXPECT_EQ(std::filesystem::path(o.data_path).extension(), ".ndjson");
  std::istringstream lines(read_file(o.data_path));
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(line.front(), '{');
    EXPECT_NE(line.find("\"E\":"), std::string::npos);
    ++count;
  }
  EXPECT_EQ(count, o.result.records.size());
}

TEST_F(CommandsTest, OutputDirectoryResolution) {
  auto config = load_config(fixture("minimal.ini"));
  config.output.directory = "from_config";
  EXPECT_EQ(resolve_output_directory(config, std::nullopt), "from_config");
  setenv("FJMGT_OUTPUT_DIR", "from_env", 1);
  EXPECT_EQ(resolve_output_directory(config, std::nullopt), "from_env");
  EXPECT_EQ(resolve_output_directory(config, std::string("from_flag")), "from_flag");
}

TEST_F(CommandsTest, WorkerResolution) {
  EXPECT_EQ(resolve_workers(std::size_t{3}), 3u);
  EXPECT_THROW(resolve_workers(std::size_t{0}), std::invalid_argument);
  setenv("FJMGT_WORKERS", "5", 1);
  EXPECT_EQ(resolve_workers(std::nullopt), 5u);
  setenv("FJMGT_WORKERS", "many", 1);
  EXPECT_THROW(resolve_workers(std::nullopt), std::invalid_argument);
  unsetenv("FJMGT_WORKERS");
  EXPECT_GE(resolve_workers(std::nullopt), 1u);
}

TEST_F(CommandsTest, ResumeMatchesUninterruptedRun) {
  auto config = load_config(fixture("linear_mode1.ini"));
  config.k = 0.4;
  config.kernel_kind = "abel";
  config.alpha = 0.4;
  config.delta = 0.1;
  const auto full = simulate(config, {dir("full"), std::nullopt});

  auto partial = config;
  partial.max_steps = 600;
  partial.output.checkpoint_interval = 300;
  const auto stopped = simulate(partial, {dir("part"), std::nullopt});
  EXPECT_EQ(stopped.result.status, dynamics::Status::MaxStepsReached);
  const auto ckp = dir("part") + "/linear.ckp";
  ASSERT_TRUE(std::filesystem::exists(ckp));

  const auto resumed = simulate(config, {dir("resumed"), ckp});
  EXPECT_EQ(resumed.result.status, dynamics::Status::Completed);
  EXPECT_EQ(read_file(resumed.data_path), read_file(full.data_path));
}

TEST_F(CommandsTest, SweepOverDataSizeOrdersTerminationTimes) {
  const auto text = read_file(fixture("blowup.ini"));
  const std::vector<double> values{1e-4, 1e-2, 1.0};
  const auto rows = sweep(text, "N0", values, 3);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].value, values[i]);
    EXPECT_NEAR(rows[i].n0, values[i], 1e-12 * values[i]);
  }
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].termination_time, rows[i - 1].termination_time);
  EXPECT_EQ(rows.back().status, dynamics::Status::BlowupSuspected);
  EXPECT_EQ(rows.front().status, dynamics::Status::Completed);

  const auto serial = sweep(text, "N0", values, 1);
  std::ostringstream a, b;
  write_sweep(a, "N0", rows);
  write_sweep(b, "N0", serial);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("# fjmgt sweep schema_version=1", 0), 0u);
}

TEST_F(CommandsTest, SweepOverConfigKey) {
  const auto rows = sweep(read_file(fixture("linear_mode1.ini")), "physics.tau", {0.5, 1.0, 2.0}, 2);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_EQ(r.status, dynamics::Status::Completed);
  EXPECT_NE(rows[0].final_energy, rows[2].final_energy);
}

TEST_F(CommandsTest, SweepValidatesEveryValueFirst) {
  const auto text = read_file(fixture("linear_mode1.ini"));
  try {
    sweep(text, "physics.tau", {1.0, 0.0, -1.0}, 1);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.errors().size(), 2u);
  }
  EXPECT_THROW(sweep(text, "physics.nope", {1.0}, 1), ConfigError);
  EXPECT_THROW(sweep(read_file(fixture("minimal.ini")), "N0", {1.0}, 1), std::invalid_argument);
}

TEST_F(CommandsTest, BoundsSummary) {
  bounds::BoundsQuery q;
  q.n0 = 1.0;
  q.c_of_t = bounds::CProfile::constant(1.0);
  const auto o = compute_bounds(q, 0.0, 101);
  EXPECT_NE(bounds_summary(o).find("T* = 1.386294"), std::string::npos);
  EXPECT_EQ(o.curve.size(), 101u);
  EXPECT_NEAR(o.curve.back().T, 3.0 * o.t_star, 1e-12);
  std::ostringstream curve;
  write_bounds_curve(curve, o);
  EXPECT_EQ(curve.str().rfind("# fjmgt bounds schema_version=1", 0), 0u);
}

TEST_F(CommandsTest, Reports) {
  const auto spec = kernel::KernelSpec::abel(0.5, 1.0);
  const auto k = kernel_report_json(spec, kernel::verify_coercivity(spec, 10, 3));
  EXPECT_NE(k.find("\"schema_version\":1"), std::string::npos);
  EXPECT_NE(k.find("\"passed\":true"), std::string::npos);
  const auto r = inequality_report_json(diagnostics::verify_inequalities(5, 2, 11));
  EXPECT_NE(r.find("\"brezis_gallouet\""), std::string::npos);
  EXPECT_NE(r.find("\"ladyzhenskaya\""), std::string::npos);
}

TEST_F(CommandsTest, ExitCodeContract) {
  const std::string out = " --output-dir " + dir("o");
  EXPECT_EQ(run_cli("simulate " + fixture("linear_mode1.ini") + out), kExitOk);
  EXPECT_EQ(run_cli("simulate " + fixture("blowup.ini") + out), kExitBlowup);
  EXPECT_NE(read_file(dir("stdout.txt")).find("\"status\":\"BlowupSuspected\""), std::string::npos);
  EXPECT_EQ(run_cli("simulate " + fixture("invalid.ini") + out), kExitValidation);
  EXPECT_NE(read_file(dir("stderr.txt")).find("tau must be > 0"), std::string::npos);
  EXPECT_EQ(run_cli("simulate " + dir("missing.ini")), kExitValidation);
  EXPECT_EQ(run_cli("simulate"), kExitValidation);
  EXPECT_EQ(run_cli("bounds --n0 1 --c0 1 --curve " + dir("curve.csv")), kExitOk);
  EXPECT_NE(read_file(dir("stdout.txt")).find("T* = 1.386294"), std::string::npos);
  EXPECT_EQ(run_cli("bounds --n0 -1"), kExitValidation);
  EXPECT_EQ(run_cli("verify-kernel --samples 5 --seed 1"), kExitOk);
  EXPECT_EQ(run_cli("verify-kernel --alpha 1.0"), kExitValidation);
  EXPECT_EQ(run_cli("verify-inequalities --dim 3 --samples 3"), kExitOk);
  EXPECT_EQ(run_cli("sweep " + fixture("linear_mode1.ini") + " --axis physics.k --values 0,0.1" + out), kExitOk);
  EXPECT_TRUE(std::filesystem::exists(dir("o") + "/linear.sweep.csv"));
}
