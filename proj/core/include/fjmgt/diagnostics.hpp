#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fjmgt/dynamics.hpp"
#include "fjmgt/spectral.hpp"

namespace fjmgt::diagnostics {

/// E = (tau/2) ||grad psi_tt||^2 + (tau c^2/2) ||Lap psi_t||^2.
double energy(const dynamics::ModalState& state, const dynamics::PhysicalParams& params,
              std::span<const double> eigenvalues);

/// ||grad psi_tt||^2 + ||Lap psi||^2 + ||Lap psi_t||^2.
double full_energy(const dynamics::ModalState& state, std::span<const double> eigenvalues);

/// ||psi_ttt||^2 + delta ||K * Lap psi_tt||^2 from modal vectors.
double dissipation_rate(std::span<const double> xi_ttt, std::span<const double> memory,
                        std::span<const double> eigenvalues, double delta);

struct NormBreakdown {
  double grad_psi_tt = 0.0;
  double lap_psi = 0.0;
  double lap_psi_t = 0.0;
  double psi_ttt = 0.0;
  double memory_lap_psi_tt = 0.0;
};

struct DiagnosticsRecord {
  std::size_t step = 0;
  double t = 0.0;
  double energy = 0.0;
  double full_energy = 0.0;
  double dissipation = 0.0;  // cumulative
  double indicator = 0.0;
  NormBreakdown norms;
};

/// Blow-up indicator. d <= 2: ||psi_t||_{H^1} + ||psi_tt||_{L^2}; d = 3: H^{3/2} and H^{1/2}.
/// scaled = true uses H^{d/2} and H^{d/2-1} for every d.
double blowup_indicator(const dynamics::ModalState& state, const spectral::SpectralBasis& basis, int dim,
                        bool scaled = false);

/// Initial-data size ||psi0||_{H^2}^2 + ||psi1||_{H^2}^2 + ||psi2||_{H^1}^2 (spectral norms).
double initial_data_size(const dynamics::ModalState& state, const spectral::SpectralBasis& basis);

/// Trapezoidal accumulation of the dissipation rate over successive time levels.
class DissipationAccumulator {
 public:
  DissipationAccumulator() = default;
  DissipationAccumulator(double value, double last_t, double last_rate)
      : value_(value), last_t_(last_t), last_rate_(last_rate), started_(true) {}

  void add(double t, double rate);
  double value() const noexcept { return value_; }
  bool started() const noexcept { return started_; }
  double last_t() const noexcept { return last_t_; }
  double last_rate() const noexcept { return last_rate_; }

 private:
  double value_ = 0.0;
  double last_t_ = 0.0;
  double last_rate_ = 0.0;
  bool started_ = false;
};

/// Record for the trajectory's current level; `cumulative` is the dissipation integral so far.
DiagnosticsRecord evaluate(const dynamics::Trajectory& trajectory, double cumulative, int dim,
                           bool scaled = false);

/// Rate at the trajectory's current level (uses its stored memory and nonlinear term).
double current_dissipation_rate(const dynamics::Trajectory& trajectory);

struct EnergySeries {
  std::vector<double> t;
  std::vector<double> full_energy;
  std::vector<double> dissipation;  // cumulative
};

/// E_full and cumulative D at every recorded state. The memory term and psi_ttt are
/// rebuilt from the stored xi_tt history, independently of the stepper's running sums.
/// Requires set_record_states(true) before integration.
EnergySeries full_energy_and_dissipation(const dynamics::Trajectory& trajectory);

enum class MonitorStatus { Passing, BlowupSuspected };

struct MonitorResult {
  MonitorStatus status = MonitorStatus::Passing;
  std::optional<double> t_first;
  std::optional<std::size_t> index;

  bool fired() const noexcept { return status == MonitorStatus::BlowupSuspected; }
};

/// Streaming form: feed records in order; latches at the first Q > cap.
class ContinuationMonitor {
 public:
  explicit ContinuationMonitor(double cap);

  /// Returns true when this record (or an earlier one) exceeded the cap.
  bool observe(double t, double indicator);
  const MonitorResult& result() const noexcept { return result_; }
  double cap() const noexcept { return cap_; }

 private:
  double cap_;
  std::size_t seen_ = 0;
  MonitorResult result_;
};

MonitorResult continuation_monitor(std::span<const DiagnosticsRecord> records, double cap);

/// CSV schema: t, E, E_full, D_cum, Q, then the five norms.
std::string csv_header();
std::string csv_row(const DiagnosticsRecord& record);

}  // namespace fjmgt::diagnostics
