#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fjmgt/diagnostics.hpp"
#include "fjmgt/dynamics.hpp"
#include "fjmgt/spectral.hpp"

namespace fjmgt::simulation {

struct TimeSettings {
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t output_stride = 1;
  std::size_t max_steps = 0;  // 0: no limit beyond t_end
};

struct MonitorSettings {
  int dimension = 1;
  std::optional<double> cap;  // unset: record Q, never stop
  bool scaled = false;
};

struct SimulationSetup {
  spectral::DomainSpec domain = spectral::DomainSpec::interval(3.141592653589793);
  std::size_t n_modes = 1;
  dynamics::PhysicalParams params;
  spectral::InitialCoefficients initial;
  TimeSettings time;
  MonitorSettings monitor;
  std::size_t checkpoint_interval = 0;  // steps; 0 disables
  std::string checkpoint_path;

  /// Throws std::invalid_argument on the first violated invariant.
  void validate() const;
  /// Number of dt steps to reach t_end.
  std::size_t total_steps() const;
};

/// FNV-1a over everything that determines the trajectory (domain, modes, physics, data, dt, monitor).
std::uint64_t config_hash(const SimulationSetup& setup);

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint64_t config_hash = 0;
  dynamics::TrajectorySnapshot snapshot;
  double dissipation = 0.0;
  double dissipation_last_t = 0.0;
  double dissipation_last_rate = 0.0;
  double max_indicator = 0.0;
  std::vector<diagnostics::DiagnosticsRecord> records;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

struct RunResult {
  dynamics::Status status = dynamics::Status::Running;
  std::optional<double> termination_time;
  std::size_t steps = 0;
  double max_indicator = 0.0;
  std::vector<diagnostics::DiagnosticsRecord> records;
  dynamics::ModalState final_state;
};

/// Drives one trajectory: diagnostics every step, records every output stride
/// (plus the final record and the one where the monitor fires), optional checkpoints.
class Simulation {
 public:
  explicit Simulation(SimulationSetup setup);
  Simulation(SimulationSetup setup, std::shared_ptr<const spectral::SpectralBasis> basis,
             std::shared_ptr<const spectral::AssembledOperators> ops);

  RunResult run();
  /// Continue from a checkpoint written by an identically configured simulation.
  RunResult resume(const Checkpoint& checkpoint);

  Checkpoint checkpoint() const;

  const SimulationSetup& setup() const noexcept { return setup_; }
  const dynamics::Trajectory& trajectory() const noexcept { return *trajectory_; }
  dynamics::Trajectory& trajectory() noexcept { return *trajectory_; }

 private:
  RunResult integrate();
  void reset();

  SimulationSetup setup_;
  std::uint64_t hash_;
  std::shared_ptr<const spectral::SpectralBasis> basis_;
  std::shared_ptr<const spectral::AssembledOperators> ops_;
  std::unique_ptr<dynamics::Trajectory> trajectory_;
  diagnostics::DissipationAccumulator dissipation_;
  double max_indicator_ = 0.0;
  std::vector<diagnostics::DiagnosticsRecord> records_;
};

/// Convenience wrapper: Simulation(setup).run().
RunResult run(const SimulationSetup& setup);

}  // namespace fjmgt::simulation
