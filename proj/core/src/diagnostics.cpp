#include "fjmgt/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fjmgt/kernel.hpp"

namespace fjmgt::diagnostics {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw std::invalid_argument(std::string(what) + " does not match the number of modes");
}

double weighted_sq(std::span<const double> c, std::span<const double> eig, int power) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    double w = 1.0;
    for (int p = 0; p < power; ++p) w *= eig[k];
    s += w * c[k] * c[k];
  }
  return s;
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

double energy(const dynamics::ModalState& state, const dynamics::PhysicalParams& params,
              std::span<const double> eigenvalues) {
  require_size(state.size(), eigenvalues.size(), "state");
  const double grad_tt = weighted_sq(state.xi_tt, eigenvalues, 1);
  const double lap_t = weighted_sq(state.xi_t, eigenvalues, 2);
  return 0.5 * params.tau * grad_tt + 0.5 * params.tau * params.c * params.c * lap_t;
}

double full_energy(const dynamics::ModalState& state, std::span<const double> eigenvalues) {
  require_size(state.size(), eigenvalues.size(), "state");
  return weighted_sq(state.xi_tt, eigenvalues, 1) + weighted_sq(state.xi, eigenvalues, 2) +
         weighted_sq(state.xi_t, eigenvalues, 2);
}

double dissipation_rate(std::span<const double> xi_ttt, std::span<const double> memory,
                        std::span<const double> eigenvalues, double delta) {
  require_size(xi_ttt.size(), eigenvalues.size(), "xi_ttt");
  require_size(memory.size(), eigenvalues.size(), "memory");
  double rate = 0.0;
  for (double v : xi_ttt) rate += v * v;
  if (delta > 0.0) rate += delta * weighted_sq(memory, eigenvalues, 2);
  return rate;
}

double blowup_indicator(const dynamics::ModalState& state, const spectral::SpectralBasis& basis, int dim,
                        bool scaled) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("monitor dimension must be 1, 2 or 3");
  require_size(state.size(), basis.size(), "state");
  double s_t = 1.0;
  double s_tt = 0.0;
  if (scaled) {
    s_t = 0.5 * dim;
    s_tt = 0.5 * dim - 1.0;
  } else if (dim == 3) {
    s_t = 1.5;
    s_tt = 0.5;
  }
  const auto eig = basis.eigenvalues();
  return spectral::spectral_norm(state.xi_t, eig, s_t) + spectral::spectral_norm(state.xi_tt, eig, s_tt);
}

void DissipationAccumulator::add(double t, double rate) {
  if (!std::isfinite(rate) || rate < 0.0) throw std::invalid_argument("dissipation rate must be finite and >= 0");
  if (started_) {
    if (!(t > last_t_)) throw std::invalid_argument("dissipation samples must increase in t");
    value_ += 0.5 * (t - last_t_) * (rate + last_rate_);
  }
  last_t_ = t;
  last_rate_ = rate;
  started_ = true;
}

double current_dissipation_rate(const dynamics::Trajectory& trajectory) {
  const auto xi_ttt = trajectory.third_derivative();
  return dissipation_rate(xi_ttt, trajectory.memory(), trajectory.basis().eigenvalues(),
                          trajectory.params().kernel.delta());
}

DiagnosticsRecord evaluate(const dynamics::Trajectory& trajectory, double cumulative, int dim, bool scaled) {
  const auto& state = trajectory.state();
  const auto eig = trajectory.basis().eigenvalues();
  const auto xi_ttt = trajectory.third_derivative();

  DiagnosticsRecord r;
  r.step = trajectory.steps();
  r.t = state.t;
  r.energy = energy(state, trajectory.params(), eig);
  r.full_energy = full_energy(state, eig);
  r.dissipation = cumulative;
  r.indicator = blowup_indicator(state, trajectory.basis(), dim, scaled);
  r.norms.grad_psi_tt = std::sqrt(weighted_sq(state.xi_tt, eig, 1));
  r.norms.lap_psi = std::sqrt(weighted_sq(state.xi, eig, 2));
  r.norms.lap_psi_t = std::sqrt(weighted_sq(state.xi_t, eig, 2));
  double sq = 0.0;
  for (double v : xi_ttt) sq += v * v;
  r.norms.psi_ttt = std::sqrt(sq);
  r.norms.memory_lap_psi_tt = std::sqrt(weighted_sq(trajectory.memory(), eig, 2));
  return r;
}

EnergySeries full_energy_and_dissipation(const dynamics::Trajectory& trajectory) {
  const auto states = trajectory.states();
  if (states.empty()) throw std::invalid_argument("trajectory has no recorded states");
  const auto history = trajectory.history();
  if (states.size() != history.size())
    throw std::invalid_argument("recorded states do not cover the full history");

  const auto& params = trajectory.params();
  const auto eig = trajectory.basis().eigenvalues();
  const std::size_t n = trajectory.basis().size();
  const double delta = params.kernel.delta();
  std::optional<kernel::QuadratureWeights> weights;
  if (params.kernel.active()) weights = kernel::quadrature_weights(params.kernel, trajectory.dt(), states.size());

  EnergySeries out;
  DissipationAccumulator acc;
  for (std::size_t j = 0; j < states.size(); ++j) {
    std::vector<double> memory(n, 0.0);
    if (weights && j > 0) memory = kernel::convolve_history(*weights, history.subspan(1, j), j - 1);
    const auto nl = dynamics::nonlinear_rhs(states[j], trajectory.operators()->tensor, params.k, params.tau);
    const auto xi_ttt = dynamics::third_derivative(trajectory.linear(), states[j], memory, nl);
    acc.add(states[j].t, dissipation_rate(xi_ttt, memory, eig, delta));
    out.t.push_back(states[j].t);
    out.full_energy.push_back(full_energy(states[j], eig));
    out.dissipation.push_back(acc.value());
  }
  return out;
}

ContinuationMonitor::ContinuationMonitor(double cap) : cap_(cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("monitor cap must be > 0");
}

bool ContinuationMonitor::observe(double t, double indicator) {
  if (result_.fired()) return true;
  // A non-finite indicator is treated as exceeding any cap.
  if (!(indicator <= cap_)) {
    result_.status = MonitorStatus::BlowupSuspected;
    result_.t_first = t;
    result_.index = seen_;
  }
  ++seen_;
  return result_.fired();
}

MonitorResult continuation_monitor(std::span<const DiagnosticsRecord> records, double cap) {
  ContinuationMonitor monitor(cap);
  for (const auto& r : records)
    if (monitor.observe(r.t, r.indicator)) break;
  return monitor.result();
}

std::string csv_header() {
  return "t,E,E_full,D_cum,Q,grad_psi_tt,lap_psi,lap_psi_t,psi_ttt,memory_lap_psi_tt";
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string out;
  const double values[] = {r.t, r.energy, r.full_energy, r.dissipation, r.indicator,
                           r.norms.grad_psi_tt, r.norms.lap_psi, r.norms.lap_psi_t,
                           r.norms.psi_ttt, r.norms.memory_lap_psi_tt};
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    append_number(out, v);
    first = false;
  }
  return out;
}

double initial_data_size(const dynamics::ModalState& state, const spectral::SpectralBasis& basis) {
  if (state.size() != basis.size()) throw std::invalid_argument("state and basis sizes differ");
  const auto eig = basis.eigenvalues();
  const double a = spectral::spectral_norm(state.xi, eig, 2.0);
  const double b = spectral::spectral_norm(state.xi_t, eig, 2.0);
  const double c = spectral::spectral_norm(state.xi_tt, eig, 1.0);
  return a * a + b * b + c * c;
}

}  // namespace fjmgt::diagnostics
