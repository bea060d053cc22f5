#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fjmgt/simulation.hpp"

using namespace fjmgt;
using namespace fjmgt::simulation;

namespace {

SimulationSetup small_setup() {
  SimulationSetup s;
  s.domain = spectral::DomainSpec::interval(3.141592653589793);
  s.n_modes = 4;
  s.params.tau = 0.5;
  s.params.c = 1.0;
  s.params.k = 0.3;
  s.params.kernel = kernel::KernelSpec::abel(0.5, 0.2);
  s.initial.xi = {0.4, -0.1, 0.05, 0.0};
  s.initial.xi_t = {0.0, 0.2, 0.0, -0.03};
  s.initial.xi_tt = {-0.4, 0.0, 0.1, 0.0};
  s.time.dt = 1e-3;
  s.time.t_end = 0.5;
  s.time.output_stride = 10;
  return s;
}

std::string csv_of(const RunResult& r) {
  std::ostringstream out;
  out << diagnostics::csv_header() << '\n';
  for (const auto& rec : r.records) out << diagnostics::csv_row(rec) << '\n';
  return out.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fjmgt_test_" + name);
}

void expect_bitwise_equal(const dynamics::ModalState& a, const dynamics::ModalState& b) {
  EXPECT_EQ(a.t, b.t);
  EXPECT_EQ(a.xi, b.xi);
  EXPECT_EQ(a.xi_t, b.xi_t);
  EXPECT_EQ(a.xi_tt, b.xi_tt);
}

}  // namespace

TEST(SimulationSetupTest, AcceptsValidSetup) { EXPECT_NO_THROW(small_setup().validate()); }

TEST(SimulationSetupTest, RejectsInvalidFields) {
  auto expect_reject = [](auto mutate) {
    auto s = small_setup();
    mutate(s);
    EXPECT_THROW(s.validate(), std::invalid_argument);
  };
  expect_reject([](SimulationSetup& s) { s.params.tau = 0.0; });
  expect_reject([](SimulationSetup& s) { s.params.c = -1.0; });
  expect_reject([](SimulationSetup& s) { s.n_modes = 0; });
  expect_reject([](SimulationSetup& s) { s.initial.xi.pop_back(); });
  expect_reject([](SimulationSetup& s) { s.time.dt = 0.0; });
  expect_reject([](SimulationSetup& s) { s.time.t_end = -1.0; });
  expect_reject([](SimulationSetup& s) { s.time.output_stride = 0; });
  expect_reject([](SimulationSetup& s) { s.time.output_stride = 7; });
  expect_reject([](SimulationSetup& s) { s.monitor.dimension = 4; });
  expect_reject([](SimulationSetup& s) { s.monitor.cap = 0.0; });
  expect_reject([](SimulationSetup& s) { s.checkpoint_interval = 10; });
}

TEST(SimulationSetupTest, TotalSteps) {
  auto s = small_setup();
  EXPECT_EQ(s.total_steps(), 500u);
  s.time.dt = 0.1;
  s.time.t_end = 0.3;
  s.time.output_stride = 1;
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.total_steps(), 3u);
}

TEST(ConfigHashTest, SensitiveToTrajectoryInputsOnly) {
  const auto base = small_setup();
  const auto h = config_hash(base);
  auto s = base;
  s.params.k = 0.31;
  EXPECT_NE(config_hash(s), h);
  s = base;
  s.initial.xi_tt[3] = 1e-12;
  EXPECT_NE(config_hash(s), h);
  s = base;
  s.params.kernel = kernel::KernelSpec::abel(0.5, 0.21);
  EXPECT_NE(config_hash(s), h);
  s = base;
  s.time.t_end = 2.0;
  s.time.output_stride = 1;
  EXPECT_EQ(config_hash(s), h);
}

TEST(SimulationTest, RecordsEveryStride) {
  const auto r = run(small_setup());
  EXPECT_EQ(r.status, dynamics::Status::Completed);
  EXPECT_EQ(r.steps, 500u);
  ASSERT_EQ(r.records.size(), 51u);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    EXPECT_EQ(r.records[i].step, 10 * i);
    EXPECT_NEAR(r.records[i].t, 0.01 * static_cast<double>(i), 1e-14);
  }
  EXPECT_DOUBLE_EQ(r.final_state.t, 0.5);
  ASSERT_TRUE(r.termination_time.has_value());
  EXPECT_DOUBLE_EQ(*r.termination_time, 0.5);
}

TEST(SimulationTest, CumulativeDissipationIsMonotone) {
  const auto r = run(small_setup());
  for (std::size_t i = 1; i < r.records.size(); ++i) EXPECT_GE(r.records[i].dissipation, r.records[i - 1].dissipation);
  EXPECT_GT(r.records.back().dissipation, 0.0);
}

TEST(SimulationTest, MaxIndicatorDominatesRecords) {
  const auto r = run(small_setup());
  for (const auto& rec : r.records) EXPECT_LE(rec.indicator, r.max_indicator);
}

TEST(SimulationTest, MaxStepsReached) {
  auto s = small_setup();
  s.time.max_steps = 123;
  const auto r = run(s);
  EXPECT_EQ(r.status, dynamics::Status::MaxStepsReached);
  EXPECT_EQ(r.steps, 123u);
  EXPECT_EQ(r.records.back().step, 123u);
  EXPECT_EQ(r.records.size(), 14u);
}

TEST(SimulationTest, MonitorStopsRun) {
  auto s = small_setup();
  const auto free_run = run(s);
  s.monitor.cap = 0.5 * (free_run.records.front().indicator + free_run.max_indicator);
  if (!(free_run.max_indicator > free_run.records.front().indicator)) GTEST_SKIP();
  const auto r = run(s);
  EXPECT_EQ(r.status, dynamics::Status::BlowupSuspected);
  ASSERT_TRUE(r.termination_time.has_value());
  EXPECT_GT(r.records.back().indicator, *s.monitor.cap);
  EXPECT_LT(r.steps, 500u);
}

TEST(SimulationTest, InitialDataAboveCapStopsImmediately) {
  auto s = small_setup();
  s.monitor.cap = 1e-6;
  const auto r = run(s);
  EXPECT_EQ(r.status, dynamics::Status::BlowupSuspected);
  EXPECT_EQ(r.steps, 0u);
  ASSERT_TRUE(r.termination_time.has_value());
  EXPECT_EQ(*r.termination_time, 0.0);
}

TEST(SimulationTest, DeterministicCsv) {
  const auto a = csv_of(run(small_setup()));
  const auto b = csv_of(run(small_setup()));
  EXPECT_EQ(a, b);
}

TEST(SimulationTest, RepeatedRunResetsState) {
  Simulation sim(small_setup());
  const auto a = sim.run();
  const auto b = sim.run();
  expect_bitwise_equal(a.final_state, b.final_state);
  EXPECT_EQ(csv_of(a), csv_of(b));
}

TEST(CheckpointTest, RoundTripIsBitwise) {
  Simulation sim(small_setup());
  sim.run();
  const auto cp = sim.checkpoint();
  const auto path = temp_path("roundtrip.ckp");
  save_checkpoint(path.string(), cp);
  const auto back = load_checkpoint(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(back.config_hash, cp.config_hash);
  EXPECT_EQ(back.snapshot.steps, cp.snapshot.steps);
  expect_bitwise_equal(back.snapshot.state, cp.snapshot.state);
  EXPECT_EQ(back.snapshot.nonlinear_prev, cp.snapshot.nonlinear_prev);
  EXPECT_EQ(back.snapshot.memory, cp.snapshot.memory);
  EXPECT_EQ(back.snapshot.history, cp.snapshot.history);
  EXPECT_EQ(back.dissipation, cp.dissipation);
  EXPECT_EQ(back.max_indicator, cp.max_indicator);
  ASSERT_EQ(back.records.size(), cp.records.size());
  EXPECT_EQ(diagnostics::csv_row(back.records.back()), diagnostics::csv_row(cp.records.back()));
}

TEST(CheckpointTest, ResumeReproducesUninterruptedRun) {
  const auto path = temp_path("resume.ckp");
  auto interrupted = small_setup();
  interrupted.time.max_steps = 200;
  interrupted.checkpoint_interval = 100;
  interrupted.checkpoint_path = path.string();
  const auto partial = run(interrupted);
  ASSERT_EQ(partial.status, dynamics::Status::MaxStepsReached);

  const auto cp = load_checkpoint(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(cp.snapshot.steps, 200u);

  Simulation resumed(small_setup());
  const auto r = resumed.resume(cp);
  const auto full = run(small_setup());
  EXPECT_EQ(r.status, dynamics::Status::Completed);
  expect_bitwise_equal(r.final_state, full.final_state);
  EXPECT_EQ(csv_of(r), csv_of(full));
}

TEST(CheckpointTest, ConfigurationMismatchIsRejected) {
  Simulation sim(small_setup());
  sim.run();
  const auto cp = sim.checkpoint();
  auto other = small_setup();
  other.params.k = 0.0;
  Simulation different(other);
  EXPECT_THROW(different.resume(cp), CheckpointError);
}

TEST(CheckpointTest, CorruptFilesAreRejected) {
  const auto path = temp_path("corrupt.ckp");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTACKPT";
  }
  EXPECT_THROW(load_checkpoint(path.string()), CheckpointError);

  Simulation sim(small_setup());
  sim.run();
  save_checkpoint(path.string(), sim.checkpoint());
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size / 2);
  EXPECT_THROW(load_checkpoint(path.string()), CheckpointError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint(path.string()), CheckpointError);
}
