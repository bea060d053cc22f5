#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fjmgt/bounds.hpp"
#include "fjmgt/cli/config.hpp"
#include "fjmgt/inequalities.hpp"
#include "fjmgt/kernel.hpp"
#include "fjmgt/simulation.hpp"

namespace fjmgt::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,  // bad input or a failed verification
  kExitBlowup = 2,      // simulate stopped with BlowupSuspected
};

inline constexpr int kSchemaVersion = 1;

/// --output-dir flag, else FJMGT_OUTPUT_DIR, else the config value.
std::string resolve_output_directory(const RunConfig& config, const std::optional<std::string>& flag);
/// --workers flag, else FJMGT_WORKERS, else the hardware concurrency (at least 1).
std::size_t resolve_workers(const std::optional<std::size_t>& flag);

int exit_code(dynamics::Status status);

void write_records(std::ostream& out, const std::vector<diagnostics::DiagnosticsRecord>& records,
                   OutputFormat format);

struct SimulateOptions {
  std::optional<std::string> output_directory;
  std::optional<std::string> resume_from;
};

struct SimulateOutcome {
  simulation::RunResult result;
  double n0 = 0.0;
  std::uint64_t config_hash = 0;
  std::string data_path;
  std::string status_path;
  int exit_code = kExitOk;
};

/// Runs the config, writes <dir>/<name>.csv|.ndjson and <dir>/<name>.status.json.
SimulateOutcome simulate(const RunConfig& config, const SimulateOptions& options = {});
/// One-line JSON status record (also the content of the status file).
std::string status_json(const SimulateOutcome& outcome);

struct SweepRow {
  double value = 0.0;
  double n0 = 0.0;
  dynamics::Status status = dynamics::Status::Running;
  double termination_time = 0.0;
  double max_indicator = 0.0;
  double final_energy = 0.0;
};

/// One run per value of `axis`, a "section.key" of the config or "N0" (rescales the
/// initial data to the requested size). Every variant is validated before any run starts.
/// Rows come back in the order of `values` whatever the worker count.
std::vector<SweepRow> sweep(const std::string& config_text, const std::string& axis, const std::vector<double>& values,
                            std::size_t workers);
void write_sweep(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows);

struct BoundsOutcome {
  bounds::BoundsQuery query;
  double t_star = 0.0;
  double t0_at_t_star = 0.0;
  std::vector<bounds::CurvePoint> curve;
};

/// t_max = 0 samples the curve on [0, 3 T*].
BoundsOutcome compute_bounds(const bounds::BoundsQuery& query, double t_max, std::size_t points);
void write_bounds_curve(std::ostream& out, const BoundsOutcome& outcome);
std::string bounds_summary(const BoundsOutcome& outcome);

std::string kernel_report_json(const kernel::KernelSpec& spec, const kernel::CoercivitySummary& summary);
std::string inequality_report_json(const diagnostics::InequalityReport& report);

}  // namespace fjmgt::cli
