#include "fjmgt/simulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace fjmgt::simulation {

namespace {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void vec(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

void SimulationSetup::validate() const {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  params.validate();
  if (initial.xi.size() != n_modes || initial.xi_t.size() != n_modes || initial.xi_tt.size() != n_modes)
    throw std::invalid_argument("initial data must have n_modes coefficients");
  if (!(time.dt > 0.0) || !std::isfinite(time.dt)) throw std::invalid_argument("dt must be > 0");
  if (!(time.t_end > 0.0) || !std::isfinite(time.t_end)) throw std::invalid_argument("t_end must be > 0");
  if (time.output_stride < 1) throw std::invalid_argument("output_stride must be >= 1");
  const double block = time.dt * static_cast<double>(time.output_stride);
  const double q = std::round(time.t_end / block);
  if (q < 1.0 || std::abs(q * block - time.t_end) > 1e-12 * std::max(1.0, time.t_end))
    throw std::invalid_argument("dt * output_stride must divide t_end");
  if (monitor.dimension < 1 || monitor.dimension > 3)
    throw std::invalid_argument("monitor dimension must be 1, 2 or 3");
  if (monitor.cap && !(*monitor.cap > 0.0)) throw std::invalid_argument("monitor cap must be > 0");
  if (checkpoint_interval > 0 && checkpoint_path.empty())
    throw std::invalid_argument("checkpoint_interval needs a checkpoint path");
}

std::size_t SimulationSetup::total_steps() const {
  return static_cast<std::size_t>(std::llround(time.t_end / time.dt));
}

std::uint64_t config_hash(const SimulationSetup& s) {
  Fnv1a h;
  h.u64(static_cast<std::uint64_t>(s.domain.dim()));
  for (double L : s.domain.lengths()) h.f64(L);
  h.u64(s.n_modes);
  h.f64(s.params.tau);
  h.f64(s.params.c);
  h.f64(s.params.k);
  h.u64(static_cast<std::uint64_t>(s.params.kernel.kind()));
  h.f64(s.params.kernel.alpha());
  h.f64(s.params.kernel.rate());
  h.f64(s.params.kernel.scale());
  h.f64(s.params.kernel.delta());
  h.vec(s.initial.xi);
  h.vec(s.initial.xi_t);
  h.vec(s.initial.xi_tt);
  h.f64(s.time.dt);
  h.u64(static_cast<std::uint64_t>(s.monitor.dimension));
  h.f64(s.monitor.cap.value_or(-1.0));
  h.u64(s.monitor.scaled ? 1 : 0);
  return h.value();
}

Simulation::Simulation(SimulationSetup setup) : Simulation(std::move(setup), nullptr, nullptr) {}

Simulation::Simulation(SimulationSetup setup, std::shared_ptr<const spectral::SpectralBasis> basis,
                       std::shared_ptr<const spectral::AssembledOperators> ops)
    : setup_(std::move(setup)), basis_(std::move(basis)), ops_(std::move(ops)) {
  setup_.validate();
  hash_ = config_hash(setup_);
  if (!basis_) basis_ = std::make_shared<const spectral::SpectralBasis>(spectral::eigenpairs(setup_.domain, setup_.n_modes));
  if (basis_->size() != setup_.n_modes || !(basis_->domain() == setup_.domain))
    throw std::invalid_argument("supplied basis does not match the setup");
  if (!ops_) ops_ = std::make_shared<const spectral::AssembledOperators>(spectral::assemble(*basis_));
  reset();
}

void Simulation::reset() {
  dynamics::ModalState initial;
  initial.xi = setup_.initial.xi;
  initial.xi_t = setup_.initial.xi_t;
  initial.xi_tt = setup_.initial.xi_tt;
  std::size_t capacity = setup_.total_steps();
  if (setup_.time.max_steps > 0) capacity = std::min(capacity, setup_.time.max_steps);
  trajectory_ = std::make_unique<dynamics::Trajectory>(setup_.params, basis_, ops_, setup_.time.dt,
                                                       std::move(initial), capacity);
  dissipation_ = diagnostics::DissipationAccumulator();
  max_indicator_ = 0.0;
  records_.clear();
}

RunResult Simulation::run() {
  reset();
  const auto rate = diagnostics::current_dissipation_rate(*trajectory_);
  dissipation_.add(trajectory_->state().t, rate);
  auto first = diagnostics::evaluate(*trajectory_, dissipation_.value(), setup_.monitor.dimension,
                                     setup_.monitor.scaled);
  max_indicator_ = first.indicator;
  records_.push_back(first);
  if (setup_.monitor.cap && !(first.indicator <= *setup_.monitor.cap)) {
    trajectory_->terminate(dynamics::Status::BlowupSuspected);
    RunResult r;
    r.status = trajectory_->status();
    r.termination_time = trajectory_->termination_time();
    r.max_indicator = max_indicator_;
    r.records = records_;
    r.final_state = trajectory_->state();
    return r;
  }
  return integrate();
}

RunResult Simulation::resume(const Checkpoint& cp) {
  if (cp.config_hash != hash_) throw CheckpointError("checkpoint was written for a different configuration");
  reset();
  trajectory_->restore(cp.snapshot);
  dissipation_ = diagnostics::DissipationAccumulator(cp.dissipation, cp.dissipation_last_t, cp.dissipation_last_rate);
  max_indicator_ = cp.max_indicator;
  records_ = cp.records;
  return integrate();
}

Checkpoint Simulation::checkpoint() const {
  Checkpoint cp;
  cp.config_hash = hash_;
  cp.snapshot = trajectory_->snapshot();
  cp.dissipation = dissipation_.value();
  cp.dissipation_last_t = dissipation_.last_t();
  cp.dissipation_last_rate = dissipation_.last_rate();
  cp.max_indicator = max_indicator_;
  cp.records = records_;
  return cp;
}

RunResult Simulation::integrate() {
  auto& traj = *trajectory_;
  const std::size_t target = setup_.total_steps();
  const std::size_t stride = setup_.time.output_stride;
  const int dim = setup_.monitor.dimension;
  const bool scaled = setup_.monitor.scaled;
  std::optional<diagnostics::ContinuationMonitor> monitor;
  if (setup_.monitor.cap) monitor.emplace(*setup_.monitor.cap);
  bool last_recorded = !records_.empty() && records_.back().step == traj.steps();
  diagnostics::DiagnosticsRecord last{};

  while (traj.steps() < target) {
    if (!traj.step()) break;  // non-finite state or capacity exhausted
    const double rate = diagnostics::current_dissipation_rate(traj);
    if (!std::isfinite(rate)) {
      traj.terminate(dynamics::Status::BlowupSuspected);
      break;
    }
    dissipation_.add(traj.state().t, rate);
    last = diagnostics::evaluate(traj, dissipation_.value(), dim, scaled);
    max_indicator_ = std::max(max_indicator_, last.indicator);
    last_recorded = false;
    if (traj.steps() % stride == 0) {
      records_.push_back(last);
      last_recorded = true;
    }
    if (monitor && monitor->observe(last.t, last.indicator)) {
      traj.terminate(dynamics::Status::BlowupSuspected);
      break;
    }
    if (setup_.checkpoint_interval > 0 && traj.steps() % setup_.checkpoint_interval == 0)
      save_checkpoint(setup_.checkpoint_path, checkpoint());
  }

  if (traj.status() == dynamics::Status::Running) {
    if (traj.steps() >= target)
      traj.terminate(dynamics::Status::Completed);
    else
      traj.terminate(dynamics::Status::MaxStepsReached);
  }
  if (!last_recorded) {
    if (records_.empty() || records_.back().step != traj.steps())
      records_.push_back(traj.steps() == last.step && traj.steps() > 0
                             ? last
                             : diagnostics::evaluate(traj, dissipation_.value(), dim, scaled));
  }

  RunResult r;
  r.status = traj.status();
  r.termination_time = traj.termination_time();
  r.steps = traj.steps();
  r.max_indicator = max_indicator_;
  r.records = records_;
  r.final_state = traj.state();
  return r;
}

RunResult run(const SimulationSetup& setup) { return Simulation(setup).run(); }

}  // namespace fjmgt::simulation
