#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fjmgt/simulation.hpp"

namespace fjmgt::cli {

/// Every violation found while reading a configuration, in file order.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

enum class OutputFormat { Csv, Ndjson };

std::string to_string(OutputFormat format);

/// Named analytic profile sampled on the box and projected onto the basis.
/// zero, sine (ground mode shape), bump (product of 4x(L-x)/L^2),
/// gaussian (centered, width 0.1 L per axis) or random (seeded modal coefficients).
struct Profile {
  std::string name = "zero";
  double amplitude = 1.0;

  friend bool operator==(const Profile&, const Profile&) = default;
};

struct InitSettings {
  /// Per-mode (xi, xi_t, xi_tt) by 1-based mode number; exclusive with the profiles.
  std::map<std::size_t, std::array<double, 3>> modes;
  std::array<Profile, 3> profiles;  // psi0, psi1, psi2
  double scale = 1.0;               // multiplies all initial data

  friend bool operator==(const InitSettings&, const InitSettings&) = default;
};

struct OutputSettings {
  std::string directory = ".";
  std::string name = "run";
  OutputFormat format = OutputFormat::Csv;
  std::size_t checkpoint_interval = 0;

  friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

struct RunConfig {
  int dim = 1;
  std::vector<double> lengths;  // empty: pi on every axis
  std::size_t n_modes = 1;

  double tau = 1.0;
  double c = 1.0;
  double k = 0.0;

  std::string kernel_kind = "zero";
  double alpha = 0.5;
  double rate = 1.0;
  double kernel_scale = 1.0;
  double delta = 0.0;

  InitSettings init;

  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t output_stride = 1;
  std::size_t max_steps = 0;

  std::optional<int> monitor_dimension;  // unset: the domain dimension
  std::optional<double> cap;
  bool scaled = false;

  OutputSettings output;
  std::uint64_t seed = 0;

  std::vector<double> domain_lengths() const;
  kernel::KernelSpec kernel() const;
  dynamics::PhysicalParams params() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// "section.key" = value replacements applied before validation.
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// INI text to a fully validated RunConfig; throws ConfigError listing every violation.
RunConfig parse_config(const std::string& text, const Overrides& overrides = {});
RunConfig load_config(const std::string& path, const Overrides& overrides = {});

/// Canonical INI text; parse_config(save_config(c)) == c.
std::string save_config(const RunConfig& config);

/// Basis, operators and setup (initial data projected or copied) for a validated config.
/// Checkpoints, when enabled, go to <output_directory>/<name>.ckp.
struct PreparedRun {
  std::shared_ptr<const spectral::SpectralBasis> basis;
  std::shared_ptr<const spectral::AssembledOperators> operators;
  simulation::SimulationSetup setup;
};

PreparedRun prepare(const RunConfig& config, const std::string& output_directory);

/// Initial modal coefficients of the config on `basis`.
spectral::InitialCoefficients initial_coefficients(const RunConfig& config, const spectral::SpectralBasis& basis);

}  // namespace fjmgt::cli
