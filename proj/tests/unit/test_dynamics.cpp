#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fjmgt/dynamics.hpp"
#include "fjmgt/kernel.hpp"
#include "oracles.hpp"

using namespace fjmgt;
using dynamics::ModalState;
using dynamics::PhysicalParams;
using dynamics::Status;
using dynamics::Trajectory;
constexpr double kPi = std::numbers::pi;

namespace {

struct Setup {
  std::shared_ptr<const spectral::SpectralBasis> basis;
  std::shared_ptr<const spectral::AssembledOperators> ops;
};

Setup interval_setup(std::size_t n, double length = kPi) {
  auto b = std::make_shared<const spectral::SpectralBasis>(spectral::eigenpairs(spectral::DomainSpec::interval(length), n));
  auto o = std::make_shared<const spectral::AssembledOperators>(spectral::assemble(*b));
  return {b, o};
}

PhysicalParams params(double tau, double c, double k = 0.0, kernel::KernelSpec kern = kernel::KernelSpec::zero()) {
  PhysicalParams p;
  p.tau = tau;
  p.c = c;
  p.k = k;
  p.kernel = kern;
  return p;
}

ModalState single(double x, double v, double a, std::size_t n = 1) {
  auto s = ModalState::zero(n);
  s.xi[0] = x;
  s.xi_t[0] = v;
  s.xi_tt[0] = a;
  return s;
}

Trajectory run_to(const PhysicalParams& p, const Setup& s, double dt, const ModalState& init, std::size_t steps) {
  Trajectory tr(p, s.basis, s.ops, dt, init, steps);
  while (tr.step()) {
  }
  return tr;
}

double linear_oracle_error(double dt, double t_end) {
  const auto s = interval_setup(1);
  const auto p = params(1.0, 1.0);
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  const auto tr = run_to(p, s, dt, single(0.0, 0.0, 1.0), steps);
  oracles::LinearModalOracle exact(1.0, 1.0, 1.0, 0.0, 0.0, 1.0);
  return std::abs(tr.state().xi_tt[0] - exact(tr.state().t)[2]);
}

}  // namespace

TEST(PhysicalParamsTest, RejectsNonPositiveTauAndC) {
  EXPECT_THROW(params(0.0, 1.0).validate(), std::invalid_argument);
  EXPECT_THROW(params(-1.0, 1.0).validate(), std::invalid_argument);
  EXPECT_THROW(params(1.0, 0.0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(params(1e-6, 2.0, -3.0).validate());
}

TEST(ModalStateTest, ChiConcatenatesAndChecksFiniteness) {
  auto s = single(1.0, 2.0, 3.0, 2);
  EXPECT_EQ(s.chi(), (std::vector<double>{1, 0, 2, 0, 3, 0}));
  EXPECT_TRUE(s.finite());
  s.xi_t[1] = std::nan("");
  EXPECT_FALSE(s.finite());
}

TEST(AssembleLinearTest, ZeroStateMapsToZero) {
  const auto s = interval_setup(4);
  const auto op = dynamics::assemble_linear(params(1.3, 0.7), *s.ops);
  for (double v : op.apply(ModalState::zero(4))) EXPECT_EQ(v, 0.0);
}

TEST(AssembleLinearTest, DisplacementDrivesAccelerationRate) {
  const auto s = interval_setup(1);
  const auto op = dynamics::assemble_linear(params(1.0, 1.0), *s.ops);
  const auto d = op.apply(single(1.0, 0.0, 0.0));
  EXPECT_EQ(d, (std::vector<double>{0.0, 0.0, -1.0}));
}

TEST(AssembleLinearTest, VelocityBlockSign) {
  const auto s = interval_setup(2);  // lambda_2 = 4
  const auto op = dynamics::assemble_linear(params(2.0, 1.0), *s.ops);
  auto st = ModalState::zero(2);
  st.xi_t[1] = 1.0;
  const auto d = op.apply(st);
  EXPECT_EQ(d[2], 0.0);                  // xi_t' = xi_tt
  EXPECT_EQ(d[0 * 2 + 1], 1.0);           // xi' = xi_t
  EXPECT_DOUBLE_EQ(d[2 * 2 + 1], -4.0);   // -c^2 lambda xi_t
}

TEST(AssembleLinearTest, ExactModalSolutionHasZeroResidual) {
  const double tau = 2.0, c = 1.0, lam = 4.0;
  const auto s = interval_setup(2);
  const auto op = dynamics::assemble_linear(params(tau, c), *s.ops);
  oracles::LinearModalOracle ex(tau, c, lam, 0.3, 1.0, -0.4);
  for (double t : {0.0, 0.7, 3.1}) {
    const auto v = ex(t);
    auto st = ModalState::zero(2);
    st.xi[1] = v[0];
    st.xi_t[1] = v[1];
    st.xi_tt[1] = v[2];
    const double e = std::exp(-t / tau), w = ex.w;
    const double third = -ex.A / (tau * tau * tau) * e + ex.B * w * w * w * std::sin(w * t) -
                         ex.C * w * w * w * std::cos(w * t);
    EXPECT_NEAR(op.apply(st)[2 * 2 + 1], third, 1e-12);
  }
}

TEST(AssembleLinearTest, DenseMatchesApply) {
  const auto s = interval_setup(3);
  const auto op = dynamics::assemble_linear(params(0.8, 1.4), *s.ops);
  const auto st = oracles::random_state(3, 11);
  const auto chi = st.chi();
  const auto a = op.dense();
  const auto y = op.apply(st);
  for (std::size_t i = 0; i < 9; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < 9; ++j) r += a[i * 9 + j] * chi[j];
    EXPECT_NEAR(r, y[i], 1e-13);
  }
}

TEST(AssembleLinearTest, MemoryBlockScalesWithDeltaOverTau) {
  const auto s = interval_setup(2);
  const auto op = dynamics::assemble_linear(params(2.0, 1.0, 0.0, kernel::KernelSpec::abel(0.5, 0.6)), *s.ops);
  const auto m = op.apply_memory(std::vector<double>{1.0, 1.0});
  EXPECT_DOUBLE_EQ(m[4], -0.3);
  EXPECT_DOUBLE_EQ(m[5], -1.2);
}

TEST(AssembleLinearTest, RejectsNonEigenbasisOperators) {
  auto ops = spectral::assemble(spectral::eigenpairs(spectral::DomainSpec::interval(kPi), 2));
  ops.stiffness[1] = 0.5;
  EXPECT_THROW(dynamics::assemble_linear(params(1.0, 1.0), ops), std::invalid_argument);
}

TEST(NonlinearRhsTest, VanishesWithoutNonlinearity) {
  const auto s = interval_setup(5);
  for (double v : dynamics::nonlinear_rhs(oracles::random_state(5, 3), s.ops->tensor, 0.0, 1.0)) EXPECT_EQ(v, 0.0);
}

TEST(NonlinearRhsTest, GroundModeSelfInteraction) {
  const auto s = interval_setup(2);
  const auto nl = dynamics::nonlinear_rhs(single(0.0, 1.0, 1.0, 2), s.ops->tensor, 1.0, 1.0);
  EXPECT_NEAR(nl[0], -2.0 * 0.677265449965237011, 1e-14);
  EXPECT_EQ(nl[1], 0.0);
}

TEST(NonlinearRhsTest, ParitySelection) {
  const auto s = interval_setup(8);
  auto st = ModalState::zero(8);
  st.xi_t[0] = 1.0;
  st.xi_tt[1] = 1.0;
  const auto nl = dynamics::nonlinear_rhs(st, s.ops->tensor, 1.0, 2.0);
  for (std::size_t j = 0; j < 8; ++j) {
    const int m = static_cast<int>(j) + 1;
    if ((1 + 2 + m) % 2 == 0)
      EXPECT_EQ(nl[j], 0.0) << m;
    else if (m <= 3)
      EXPECT_NE(nl[j], 0.0) << m;
  }
}

TEST(NonlinearRhsTest, RejectsMismatchedTensor) {
  const auto s = interval_setup(3);
  EXPECT_THROW(dynamics::nonlinear_rhs(ModalState::zero(4), s.ops->tensor, 1.0, 1.0), std::invalid_argument);
}

TEST(TrajectoryTest, CosineModeReachesMinusOneAtPi) {
  const auto s = interval_setup(1);
  const auto tr = run_to(params(1.0, 1.0), s, 1e-3, single(1.0, 0.0, -1.0), 3142);
  EXPECT_NEAR(tr.state().t, 3.142, 1e-12);
  EXPECT_NEAR(tr.state().xi[0], -1.0, 1e-4);
  EXPECT_NEAR(tr.state().xi[0], std::cos(tr.state().t), 1e-8);
}

TEST(TrajectoryTest, AccelerationMatchesExactCombination) {
  EXPECT_LT(linear_oracle_error(1e-3, 5.0), 1e-4);
}

TEST(TrajectoryTest, SecondOrderConvergence) {
  const double e1 = linear_oracle_error(1e-2, 5.0);
  const double e2 = linear_oracle_error(5e-3, 5.0);
  const double ratio = e1 / e2;
  EXPECT_GE(ratio, 3.4);
  EXPECT_LE(ratio, 4.6);
}

TEST(TrajectoryTest, ZeroDataStaysZero) {
  const auto s = interval_setup(6);
  const auto p = params(0.5, 2.0, 4.0, kernel::KernelSpec::abel(0.3, 1.5));
  const auto tr = run_to(p, s, 1e-2, ModalState::zero(6), 300);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(tr.state().xi[k], 0.0);
    EXPECT_EQ(tr.state().xi_t[k], 0.0);
    EXPECT_EQ(tr.state().xi_tt[k], 0.0);
  }
}

TEST(TrajectoryTest, CriticalCaseAbelMatchesZeroKernelBitwise) {
  const auto s = interval_setup(6);
  const auto init = oracles::random_state(6, 42, 0.1);
  const auto a = run_to(params(1.0, 1.0, 0.8, kernel::KernelSpec::abel(0.5, 0.0)), s, 1e-3, init, 500);
  const auto z = run_to(params(1.0, 1.0, 0.8, kernel::KernelSpec::zero()), s, 1e-3, init, 500);
  EXPECT_EQ(a.state().chi(), z.state().chi());
}

TEST(TrajectoryTest, HigherModesStayZeroInLinearFlow) {
  const auto s1 = interval_setup(1);
  const auto s8 = interval_setup(8);
  const auto p = params(0.7, 1.3, 0.0, kernel::KernelSpec::abel(0.5, 0.4));
  const auto a = run_to(p, s1, 1e-3, single(0.4, -0.2, 0.9), 2000);
  const auto b = run_to(p, s8, 1e-3, single(0.4, -0.2, 0.9, 8), 2000);
  EXPECT_NEAR(a.state().xi[0], b.state().xi[0], 1e-12);
  EXPECT_NEAR(a.state().xi_t[0], b.state().xi_t[0], 1e-12);
  EXPECT_NEAR(a.state().xi_tt[0], b.state().xi_tt[0], 1e-12);
  for (std::size_t k = 1; k < 8; ++k) EXPECT_EQ(b.state().xi[k], 0.0);
}

TEST(TrajectoryTest, HistoryAndStatesAdvanceByDt) {
  const auto s = interval_setup(3);
  Trajectory tr(params(1.0, 1.0), s.basis, s.ops, 0.01, oracles::random_state(3, 1), 25);
  tr.set_record_states(true);
  while (tr.step()) {
  }
  EXPECT_EQ(tr.status(), Status::MaxStepsReached);
  EXPECT_EQ(tr.steps(), 25u);
  ASSERT_EQ(tr.history().size(), 26u);
  ASSERT_EQ(tr.states().size(), 26u);
  for (std::size_t j = 0; j < 26; ++j) {
    EXPECT_DOUBLE_EQ(tr.states()[j].t, 0.01 * static_cast<double>(j));
    EXPECT_EQ(tr.history()[j], tr.states()[j].xi_tt);
  }
}

TEST(TrajectoryTest, RunningMemoryMatchesDirectConvolution) {
  const auto s = interval_setup(4);
  const auto spec = kernel::KernelSpec::abel(0.4, 0.7);
  Trajectory tr(params(1.0, 1.0, 0.3, spec), s.basis, s.ops, 0.01, oracles::random_state(4, 9, 0.2), 60);
  const auto w = kernel::quadrature_weights(spec, 0.01, 61);
  while (tr.step()) {
    const auto h = tr.history();
    const auto direct = kernel::convolve_history(w, h.subspan(1, tr.steps()), tr.steps() - 1);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(tr.memory()[k], direct[k], 1e-13);
  }
}

TEST(TrajectoryTest, ThirdDerivativeMatchesLinearOracle) {
  const auto s = interval_setup(1);
  const auto tr = run_to(params(1.0, 1.0), s, 1e-3, single(0.0, 0.0, 1.0), 1000);
  oracles::LinearModalOracle ex(1.0, 1.0, 1.0, 0.0, 0.0, 1.0);
  const double t = tr.state().t;
  const double third = -ex.A * std::exp(-t) + ex.B * std::sin(t) - ex.C * std::cos(t);
  EXPECT_NEAR(tr.third_derivative()[0], third, 1e-5);
}

TEST(TrajectoryTest, OverflowMarksBlowupAndKeepsLastState) {
  const auto s = interval_setup(2);
  const auto init = single(0.0, 1e200, 1e200, 2);
  Trajectory tr(params(1.0, 1.0, 1.0), s.basis, s.ops, 0.1, init, 10);
  EXPECT_FALSE(tr.step());
  EXPECT_EQ(tr.status(), Status::BlowupSuspected);
  ASSERT_TRUE(tr.termination_time().has_value());
  EXPECT_DOUBLE_EQ(*tr.termination_time(), 0.1);
  EXPECT_EQ(tr.steps(), 0u);
  EXPECT_TRUE(tr.state().finite());
  EXPECT_FALSE(tr.step());
}

TEST(TrajectoryTest, SnapshotRestoreIsBitIdentical) {
  const auto s = interval_setup(5);
  const auto p = params(0.9, 1.1, 0.6, kernel::KernelSpec::abel(0.5, 0.3));
  const auto init = oracles::random_state(5, 77, 0.3);
  Trajectory full(p, s.basis, s.ops, 2e-3, init, 200);
  for (int i = 0; i < 80; ++i) full.step();
  const auto snap = full.snapshot();
  while (full.step()) {
  }
  Trajectory resumed(p, s.basis, s.ops, 2e-3, init, 200);
  resumed.restore(snap);
  while (resumed.step()) {
  }
  EXPECT_EQ(full.state().chi(), resumed.state().chi());
  EXPECT_EQ(full.memory(), resumed.memory());
  EXPECT_EQ(full.state().t, resumed.state().t);
}

TEST(TrajectoryTest, RestoreRejectsInconsistentSnapshot) {
  const auto s = interval_setup(2);
  Trajectory tr(params(1.0, 1.0), s.basis, s.ops, 0.1, ModalState::zero(2), 5);
  dynamics::TrajectorySnapshot bad;
  bad.steps = 2;
  bad.state = ModalState::zero(2);
  bad.memory = {0.0, 0.0};
  bad.history = {{0.0, 0.0}};
  EXPECT_THROW(tr.restore(bad), std::invalid_argument);
}

TEST(TrajectoryTest, RejectsBadConstruction) {
  const auto s = interval_setup(2);
  EXPECT_THROW(Trajectory(params(1.0, 1.0), s.basis, s.ops, 0.0, ModalState::zero(2), 5), std::invalid_argument);
  EXPECT_THROW(Trajectory(params(1.0, 1.0), s.basis, s.ops, 0.1, ModalState::zero(3), 5), std::invalid_argument);
  EXPECT_THROW(Trajectory(params(0.0, 1.0), s.basis, s.ops, 0.1, ModalState::zero(2), 5), std::invalid_argument);
}

TEST(TrajectoryTest, TimestepRobustness) {
  // Change under halving stays within 5x of the second-order extrapolation from the finer pair.
  const auto s = interval_setup(8);
  const auto init = oracles::random_state(8, 5, 0.05);
  const std::vector<PhysicalParams> fixtures = {
      params(1.0, 0.5, 0.0), params(1.0, 0.5, 1.0), params(0.5, 0.5, 0.5, kernel::KernelSpec::abel(0.5, 0.2)),
      params(1.0, 0.5, 0.5, kernel::KernelSpec::exponential(1.0, 1.0, 0.3))};
  for (const auto& p : fixtures) {
    std::vector<double> norms;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
      const auto tr = run_to(p, s, dt, init, static_cast<std::size_t>(std::llround(2.0 / dt)));
      double n2 = 0.0;
      for (double v : tr.state().chi()) n2 += v * v;
      norms.push_back(std::sqrt(n2));
    }
    const double coarse = std::abs(norms[0] - norms[1]);
    const double fine = std::abs(norms[1] - norms[2]);
    EXPECT_LE(coarse, 5.0 * 4.0 * fine + 1e-14);
  }
}
