#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fjmgt/kernel.hpp"
#include "fjmgt/spectral.hpp"

namespace fjmgt::dynamics {

/// tau psi_ttt + (1 + 2k psi_t) psi_tt - c^2 Lap psi - tau c^2 Lap psi_t - delta K * Lap psi_tt = 0
struct PhysicalParams {
  double tau = 1.0;
  double c = 1.0;
  double k = 0.0;
  kernel::KernelSpec kernel = kernel::KernelSpec::zero();

  /// Throws std::invalid_argument unless tau > 0 and c > 0.
  void validate() const;
};

/// Modal coefficients (xi, xi_t, xi_tt) of psi, psi_t, psi_tt at time t.
struct ModalState {
  double t = 0.0;
  std::vector<double> xi;
  std::vector<double> xi_t;
  std::vector<double> xi_tt;

  static ModalState zero(std::size_t n);

  std::size_t size() const noexcept { return xi.size(); }
  /// chi = (xi, xi_t, xi_tt), length 3n.
  std::vector<double> chi() const;
  bool finite() const noexcept;
};

/// The linear part of chi' = L chi + memory + NL(chi) in the eigenbasis, per mode k:
///   xi'    = xi_t
///   xi_t'  = xi_tt
///   xi_tt' = -(c^2/tau) lambda xi - c^2 lambda xi_t - (1/tau) xi_tt - (delta/tau) lambda (K * xi_tt)
/// Signs follow the Galerkin weak form (Dirichlet Laplacian eigenvalues lambda > 0).
struct LinearOperator {
  std::size_t n = 0;
  double tau = 1.0;
  double c = 1.0;
  double delta = 0.0;
  std::vector<double> lambda;

  /// L chi without the memory block, returned as a 3n vector.
  std::vector<double> apply(const ModalState& state) const;
  /// The memory block applied to (K * xi_tt): a 3n vector nonzero only in the last n rows.
  std::vector<double> apply_memory(std::span<const double> memory) const;
  /// Dense 3n x 3n row-major matrix of the local block.
  std::vector<double> dense() const;
};

/// Requires the eigenbasis structure (M = I, K diagonal); throws otherwise.
LinearOperator assemble_linear(const PhysicalParams& params, const spectral::AssembledOperators& ops);

/// -(2k/tau) sum_{i,l} (xi_t)_i (xi_tt)_l T_{ijl}: the Galerkin image of -(2k/tau) psi_t psi_tt.
std::vector<double> nonlinear_rhs(const ModalState& state, const spectral::TripleTensor& tensor,
                                  double k, double tau);

/// xi_ttt reconstructed from the modal equation, given the convolution (K * xi_tt)(t)
/// and the nonlinear vector at the same state.
std::vector<double> third_derivative(const LinearOperator& op, const ModalState& state,
                                     std::span<const double> memory, std::span<const double> nonlinear);

enum class Status { Running, Completed, BlowupSuspected, MaxStepsReached };

std::string to_string(Status status);

/// Everything needed to resume a trajectory bit-for-bit.
struct TrajectorySnapshot {
  std::size_t steps = 0;
  ModalState state;
  std::vector<double> nonlinear_prev;  // empty before the first step
  std::vector<double> memory;
  std::vector<std::vector<double>> history;  // xi_tt(t_0) .. xi_tt(t_steps)
};

/// Time integrator for the semi-discrete Volterra system on a uniform grid.
///
/// One step is a trapezoidal (Crank-Nicolson) solve of the linear block and
/// of the lag-0 memory term, mode by mode (3x3 systems, closed-form
/// elimination), with the quadratic term extrapolated to the half step
/// (3/2 NL^n - 1/2 NL^{n-1}; forward Euler on the first step) and the
/// retarded memory sum taken from stored history. The memory term uses the
/// right-endpoint product rule (K * y)(t_n) ~ sum_{j=1}^{n} w_{n-j} y(t_j).
class Trajectory {
 public:
  Trajectory(PhysicalParams params, std::shared_ptr<const spectral::SpectralBasis> basis,
             std::shared_ptr<const spectral::AssembledOperators> ops, double dt, ModalState initial,
             std::size_t max_steps);

  /// Advance one step. Returns false (and changes status) when the run cannot continue:
  /// a non-finite result marks BlowupSuspected and keeps the last valid state.
  bool step();

  /// Stop externally, e.g. when a monitor fires or the end time is reached.
  void terminate(Status status);

  const PhysicalParams& params() const noexcept { return params_; }
  const spectral::SpectralBasis& basis() const noexcept { return *basis_; }
  std::shared_ptr<const spectral::SpectralBasis> basis_handle() const noexcept { return basis_; }
  std::shared_ptr<const spectral::AssembledOperators> operators() const noexcept { return ops_; }
  const LinearOperator& linear() const noexcept { return linear_; }
  double dt() const noexcept { return dt_; }
  std::size_t max_steps() const noexcept { return max_steps_; }
  std::size_t steps() const noexcept { return steps_; }
  const ModalState& state() const noexcept { return state_; }
  Status status() const noexcept { return status_; }
  std::optional<double> termination_time() const noexcept { return termination_time_; }

  /// xi_tt at every stored time level; history()[j] belongs to t_j.
  std::span<const std::vector<double>> history() const noexcept { return history_; }
  /// (K * xi_tt)(t_n) at the current level (zero when the memory term is inactive).
  const std::vector<double>& memory() const noexcept { return memory_; }
  /// NL at the current level.
  const std::vector<double>& nonlinear() const noexcept { return nonlinear_; }
  std::vector<double> third_derivative() const;

  /// Keep every ModalState (off by default; history is always kept).
  void set_record_states(bool on);
  std::span<const ModalState> states() const noexcept { return states_; }

  TrajectorySnapshot snapshot() const;
  /// Rebuild from a snapshot taken on an identically configured trajectory.
  void restore(const TrajectorySnapshot& snapshot);

 private:
  PhysicalParams params_;
  std::shared_ptr<const spectral::SpectralBasis> basis_;
  std::shared_ptr<const spectral::AssembledOperators> ops_;
  LinearOperator linear_;
  double dt_;
  std::size_t max_steps_;
  std::optional<kernel::QuadratureWeights> weights_;
  std::vector<double> denominators_;
  std::vector<double> memory_coeff_;

  std::size_t steps_ = 0;
  ModalState state_;
  std::vector<double> nonlinear_;
  std::vector<double> nonlinear_prev_;
  std::vector<double> memory_;
  std::vector<std::vector<double>> history_;
  std::vector<ModalState> states_;
  bool record_states_ = false;
  Status status_ = Status::Running;
  std::optional<double> termination_time_;
};

}  // namespace fjmgt::dynamics
