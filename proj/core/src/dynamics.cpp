#include "fjmgt/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace fjmgt::dynamics {

void PhysicalParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be > 0");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("sound speed c must be > 0");
  if (!std::isfinite(k)) throw std::invalid_argument("nonlinearity coefficient k must be finite");
}

ModalState ModalState::zero(std::size_t n) {
  ModalState s;
  s.xi.assign(n, 0.0);
  s.xi_t.assign(n, 0.0);
  s.xi_tt.assign(n, 0.0);
  return s;
}

std::vector<double> ModalState::chi() const {
  std::vector<double> out;
  out.reserve(3 * size());
  out.insert(out.end(), xi.begin(), xi.end());
  out.insert(out.end(), xi_t.begin(), xi_t.end());
  out.insert(out.end(), xi_tt.begin(), xi_tt.end());
  return out;
}

bool ModalState::finite() const noexcept {
  if (!std::isfinite(t)) return false;
  for (std::size_t k = 0; k < size(); ++k)
    if (!std::isfinite(xi[k]) || !std::isfinite(xi_t[k]) || !std::isfinite(xi_tt[k])) return false;
  return true;
}

std::vector<double> LinearOperator::apply(const ModalState& state) const {
  if (state.size() != n) throw std::invalid_argument("state size does not match the operator");
  std::vector<double> out(3 * n, 0.0);
  const double c2 = c * c;
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = state.xi_t[k];
    out[n + k] = state.xi_tt[k];
    out[2 * n + k] = -(c2 / tau) * lambda[k] * state.xi[k] - c2 * lambda[k] * state.xi_t[k] -
                     state.xi_tt[k] / tau;
  }
  return out;
}

std::vector<double> LinearOperator::apply_memory(std::span<const double> memory) const {
  if (memory.size() != n) throw std::invalid_argument("memory vector size does not match the operator");
  std::vector<double> out(3 * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) out[2 * n + k] = -(delta / tau) * lambda[k] * memory[k];
  return out;
}

std::vector<double> LinearOperator::dense() const {
  const std::size_t m = 3 * n;
  std::vector<double> a(m * m, 0.0);
  const double c2 = c * c;
  for (std::size_t k = 0; k < n; ++k) {
    a[k * m + (n + k)] = 1.0;
    a[(n + k) * m + (2 * n + k)] = 1.0;
    a[(2 * n + k) * m + k] = -(c2 / tau) * lambda[k];
    a[(2 * n + k) * m + (n + k)] = -c2 * lambda[k];
    a[(2 * n + k) * m + (2 * n + k)] = -1.0 / tau;
  }
  return a;
}

LinearOperator assemble_linear(const PhysicalParams& params, const spectral::AssembledOperators& ops) {
  params.validate();
  const std::size_t n = ops.n;
  if (ops.mass.size() != n * n || ops.stiffness.size() != n * n)
    throw std::invalid_argument("assembled operators have inconsistent sizes");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (ops.mass[i * n + j] != (i == j ? 1.0 : 0.0))
        throw std::invalid_argument("stepper requires an orthonormal basis (M = I)");
      if (i != j && ops.stiffness[i * n + j] != 0.0)
        throw std::invalid_argument("stepper requires a diagonal stiffness matrix");
    }
  LinearOperator op;
  op.n = n;
  op.tau = params.tau;
  op.c = params.c;
  op.delta = params.kernel.delta();
  op.lambda.resize(n);
  for (std::size_t i = 0; i < n; ++i) op.lambda[i] = ops.stiffness[i * n + i];
  return op;
}

std::vector<double> nonlinear_rhs(const ModalState& state, const spectral::TripleTensor& tensor,
                                  double k, double tau) {
  const std::size_t n = state.size();
  if (tensor.size() != n) throw std::invalid_argument("tensor does not match the mode count");
  std::vector<double> out(n, 0.0);
  if (k == 0.0) return out;
  tensor.contract(state.xi_t, state.xi_tt, out);
  const double scale = -2.0 * k / tau;
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> third_derivative(const LinearOperator& op, const ModalState& state,
                                     std::span<const double> memory, std::span<const double> nonlinear) {
  const std::size_t n = op.n;
  if (memory.size() != n || nonlinear.size() != n)
    throw std::invalid_argument("memory/nonlinear vectors do not match the operator");
  const auto lin = op.apply(state);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = lin[2 * n + k] - (op.delta / op.tau) * op.lambda[k] * memory[k] + nonlinear[k];
  return out;
}

std::string to_string(Status status) {
  switch (status) {
    case Status::Running: return "Running";
    case Status::Completed: return "Completed";
    case Status::BlowupSuspected: return "BlowupSuspected";
    case Status::MaxStepsReached: return "MaxStepsReached";
  }
  return "Unknown";
}

Trajectory::Trajectory(PhysicalParams params, std::shared_ptr<const spectral::SpectralBasis> basis,
                       std::shared_ptr<const spectral::AssembledOperators> ops, double dt,
                       ModalState initial, std::size_t max_steps)
    : params_(std::move(params)),
      basis_(std::move(basis)),
      ops_(std::move(ops)),
      dt_(dt),
      max_steps_(max_steps),
      state_(std::move(initial)) {
  if (!basis_ || !ops_) throw std::invalid_argument("trajectory needs a basis and assembled operators");
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw std::invalid_argument("time step dt must be > 0");
  if (ops_->n != basis_->size()) throw std::invalid_argument("operators do not match the basis");
  if (state_.size() != basis_->size() || state_.xi_t.size() != state_.size() ||
      state_.xi_tt.size() != state_.size())
    throw std::invalid_argument("initial state does not match the basis size");
  if (!state_.finite()) throw std::invalid_argument("initial state must be finite");
  linear_ = assemble_linear(params_, *ops_);

  const std::size_t n = linear_.n;
  state_.t = 0.0;
  memory_.assign(n, 0.0);
  memory_coeff_.assign(n, 0.0);
  if (params_.kernel.active()) {
    weights_ = kernel::quadrature_weights(params_.kernel, dt_, max_steps_ + 1);
    for (std::size_t k = 0; k < n; ++k) memory_coeff_[k] = params_.kernel.delta() / params_.tau * linear_.lambda[k];
  }

  // Effective coefficient of xi_tt^{n+1} after eliminating xi^{n+1} and xi_t^{n+1}.
  const double h = 0.5 * dt_;
  const double c2 = params_.c * params_.c;
  const double w0 = weights_ ? (*weights_)[0] : 0.0;
  denominators_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double alpha = c2 * linear_.lambda[k] / params_.tau;
    const double beta = c2 * linear_.lambda[k];
    const double gamma = 1.0 / params_.tau;
    denominators_[k] = h * h * h * alpha + h * h * beta + 1.0 + h * gamma + h * memory_coeff_[k] * w0;
  }

  history_.push_back(state_.xi_tt);
  nonlinear_ = nonlinear_rhs(state_, ops_->tensor, params_.k, params_.tau);
}

void Trajectory::set_record_states(bool on) {
  record_states_ = on;
  if (on && states_.empty()) states_.push_back(state_);
}

bool Trajectory::step() {
  if (status_ != Status::Running) return false;
  if (steps_ >= max_steps_) {
    terminate(Status::MaxStepsReached);
    return false;
  }

  const std::size_t n = linear_.n;
  const double h = 0.5 * dt_;
  const double c2 = params_.c * params_.c;
  const double gamma = 1.0 / params_.tau;

  // Mem^{n+1} = w_0 y_{n+1} + sum_{j=1}^{n} w_{n+1-j} y_j; the lag-0 part stays implicit.
  std::vector<double> retarded(n, 0.0);
  if (weights_) {
    for (std::size_t j = 1; j <= steps_; ++j) {
      const double w = (*weights_)[steps_ + 1 - j];
      const auto& y = history_[j];
      for (std::size_t k = 0; k < n; ++k) retarded[k] += w * y[k];
    }
  }

  ModalState next;
  next.xi.resize(n);
  next.xi_t.resize(n);
  next.xi_tt.resize(n);
  next.t = static_cast<double>(steps_ + 1) * dt_;

  for (std::size_t k = 0; k < n; ++k) {
    const double lam = linear_.lambda[k];
    const double alpha = c2 * lam / params_.tau;
    const double beta = c2 * lam;
    const double a = state_.xi[k];
    const double b = state_.xi_t[k];
    const double c = state_.xi_tt[k];
    const double forcing = steps_ == 0 ? nonlinear_[k] : 1.5 * nonlinear_[k] - 0.5 * nonlinear_prev_[k];

    const double r1 = a + h * b;
    const double r2 = b + h * c;
    const double r3 = c + h * (-alpha * a - beta * b - gamma * c) -
                      h * memory_coeff_[k] * (memory_[k] + retarded[k]) + dt_ * forcing;
    const double ctt = (r3 - h * alpha * (r1 + h * r2) - h * beta * r2) / denominators_[k];
    next.xi_tt[k] = ctt;
    next.xi_t[k] = r2 + h * ctt;
    next.xi[k] = r1 + h * r2 + h * h * ctt;
  }

  if (!next.finite()) {
    status_ = Status::BlowupSuspected;
    termination_time_ = next.t;
    return false;
  }

  std::vector<double> memory_next(n, 0.0);
  if (weights_) {
    const double w0 = (*weights_)[0];
    for (std::size_t k = 0; k < n; ++k) memory_next[k] = w0 * next.xi_tt[k] + retarded[k];
  }
  auto nonlinear_next = nonlinear_rhs(next, ops_->tensor, params_.k, params_.tau);
  bool finite_nl = true;
  for (double v : nonlinear_next) finite_nl = finite_nl && std::isfinite(v);
  if (!finite_nl) {
    status_ = Status::BlowupSuspected;
    termination_time_ = next.t;
    return false;
  }

  ++steps_;
  state_ = std::move(next);
  memory_ = std::move(memory_next);
  nonlinear_prev_ = std::move(nonlinear_);
  nonlinear_ = std::move(nonlinear_next);
  history_.push_back(state_.xi_tt);
  if (record_states_) states_.push_back(state_);
  return true;
}

void Trajectory::terminate(Status status) {
  if (status_ != Status::Running) return;
  status_ = status;
  termination_time_ = state_.t;
}

std::vector<double> Trajectory::third_derivative() const {
  return dynamics::third_derivative(linear_, state_, memory_, nonlinear_);
}

TrajectorySnapshot Trajectory::snapshot() const {
  TrajectorySnapshot s;
  s.steps = steps_;
  s.state = state_;
  s.nonlinear_prev = nonlinear_prev_;
  s.memory = memory_;
  s.history = history_;
  return s;
}

void Trajectory::restore(const TrajectorySnapshot& snapshot) {
  const std::size_t n = linear_.n;
  if (snapshot.state.size() != n || snapshot.memory.size() != n)
    throw std::invalid_argument("snapshot does not match the trajectory size");
  if (snapshot.history.size() != snapshot.steps + 1)
    throw std::invalid_argument("snapshot history length must equal steps + 1");
  if (snapshot.steps > max_steps_) throw std::invalid_argument("snapshot lies beyond max_steps");
  if (snapshot.steps > 0 && snapshot.nonlinear_prev.size() != n)
    throw std::invalid_argument("snapshot is missing the previous nonlinear term");
  steps_ = snapshot.steps;
  state_ = snapshot.state;
  nonlinear_prev_ = snapshot.nonlinear_prev;
  memory_ = snapshot.memory;
  history_ = snapshot.history;
  nonlinear_ = nonlinear_rhs(state_, ops_->tensor, params_.k, params_.tau);
  status_ = Status::Running;
  termination_time_.reset();
  states_.clear();
  if (record_states_) states_.push_back(state_);
}

}  // namespace fjmgt::dynamics
