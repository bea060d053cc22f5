#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fjmgt::kernel {

enum class KernelKind { Abel, Exponential, Zero };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// Memory kernel K together with the damping weight delta that multiplies
/// the term delta * (K * Laplace psi_tt).
///
/// A Zero kernel always carries delta = 0, and delta = 0 with any kernel is
/// the critical (undamped) case: `active()` is false and the dynamics never
/// touch the convolution history.
class KernelSpec {
 public:
  /// Abel kernel t^{-alpha} / Gamma(1 - alpha), alpha strictly inside (0, 1).
  static KernelSpec abel(double alpha, double delta);
  /// scale * exp(-rate * t), rate > 0, scale > 0.
  static KernelSpec exponential(double rate, double scale, double delta);
  static KernelSpec zero();

  KernelKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double rate() const noexcept { return rate_; }
  double scale() const noexcept { return scale_; }
  double delta() const noexcept { return delta_; }
  bool active() const noexcept { return delta_ > 0.0; }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  KernelSpec(KernelKind kind, double alpha, double rate, double scale, double delta);

  KernelKind kind_;
  double alpha_;
  double rate_;
  double scale_;
  double delta_;
};

/// K(t) for t > 0. Throws std::domain_error for t <= 0.
double eval_kernel(const KernelSpec& spec, double t);

/// Integral of K over [0, t], t >= 0 (closed form for every kind).
double kernel_integral(const KernelSpec& spec, double t);

/// Exact kernel moments on a uniform grid: moments[j] is the integral of K over
/// [j*dt, (j+1)*dt]. Weights depend only on the lag.
class QuadratureWeights {
 public:
  QuadratureWeights(double dt, std::vector<double> moments);

  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return moments_.size(); }
  std::span<const double> moments() const noexcept { return moments_; }
  double operator[](std::size_t lag) const { return moments_[lag]; }

 private:
  double dt_;
  std::vector<double> moments_;
};

QuadratureWeights quadrature_weights(const KernelSpec& spec, double dt, std::size_t n_steps);

/// Product-integration convolution: sum_{j=0}^{m} moments[m - j] * history[j].
///
/// With history[j] = y(t_j) this is the piecewise-constant (left endpoint)
/// approximation of (K * y)((m + 1) dt); with history[j] = y(t_{j+1}) it is the
/// right-endpoint approximation of (K * y)((m + 1) dt). Exact on constants.
std::vector<double> convolve_history(const QuadratureWeights& weights,
                                     std::span<const std::vector<double>> history,
                                     std::size_t m);

/// Same sum with the lag-0 term left out: sum_{j=0}^{m-1} moments[m - j] * history[j].
/// Accumulates into `out` (which must have the history dimension).
void accumulate_retarded(const QuadratureWeights& weights,
                         std::span<const std::vector<double>> history,
                         std::size_t m,
                         std::span<double> out);

struct CoercivityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs / rhs, or nullopt when rhs == 0 (the inequality is vacuous).
  std::optional<double> c_estimate;
  /// dt * sum ||y_m||^2, the scale used for the positivity tolerance.
  double signal_energy = 0.0;

  bool vacuous() const noexcept { return !c_estimate.has_value(); }
};

/// Discrete coercivity check of the memory term on one sampled signal:
///   lhs = dt * sum_m <(K*y)_m, y_m>,   rhs = dt * sum_m ||(K*y)_m||^2,
/// with (K*y)_m = convolve_history(weights, y, m).
/// A negative lhs is reported, not thrown: it flags a violating signal.
CoercivityReport check_coercivity(const KernelSpec& spec,
                                  std::span<const std::vector<double>> signal,
                                  double dt);

struct CoercivitySummary {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t length = 0;
  double dt = 0.0;
  /// Signals with lhs < -1e-12 * signal_energy.
  std::size_t violations = 0;
  std::size_t vacuous = 0;
  /// min over signals of lhs / signal_energy.
  double min_margin = 0.0;
  /// min over non-vacuous signals of lhs / rhs.
  std::optional<double> min_c_estimate;
};

/// Scalar piecewise-constant signal with values in [-1, 1] and random block lengths 1..20.
std::vector<std::vector<double>> random_piecewise_signal(std::uint64_t seed, std::size_t length);

/// check_coercivity over `samples` signals; signal i uses seed + i.
CoercivitySummary verify_coercivity(const KernelSpec& spec, std::size_t samples, std::uint64_t seed,
                                    std::size_t length = 100, double dt = 0.01);

}  // namespace fjmgt::kernel
