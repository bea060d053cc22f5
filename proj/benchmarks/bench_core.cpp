#include <benchmark/benchmark.h>

#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "fjmgt/dynamics.hpp"
#include "fjmgt/inequalities.hpp"
#include "fjmgt/kernel.hpp"
#include "fjmgt/spectral.hpp"

namespace {

using namespace fjmgt;

struct Operators {
  std::shared_ptr<const spectral::SpectralBasis> basis;
  std::shared_ptr<const spectral::AssembledOperators> ops;
};

Operators interval(std::size_t n) {
  auto b = std::make_shared<const spectral::SpectralBasis>(
      spectral::eigenpairs(spectral::DomainSpec::interval(std::numbers::pi), n));
  auto o = std::make_shared<const spectral::AssembledOperators>(spectral::assemble(*b));
  return {b, o};
}

dynamics::ModalState small_data(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  auto s = dynamics::ModalState::zero(n);
  for (std::size_t k = 0; k < n; ++k) {
    s.xi[k] = u(rng);
    s.xi_t[k] = u(rng);
    s.xi_tt[k] = u(rng);
  }
  return s;
}

// Cost of `steps` steps from a fresh trajectory.
void run_steps(benchmark::State& state, double k, kernel::KernelSpec kern, std::size_t n, std::size_t steps) {
  const auto op = interval(n);
  dynamics::PhysicalParams p;
  p.k = k;
  p.kernel = kern;
  const auto init = small_data(n);
  for (auto _ : state) {
    dynamics::Trajectory tr(p, op.basis, op.ops, 1e-3, init, steps);
    while (tr.step()) {
    }
    benchmark::DoNotOptimize(tr.state().xi.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * steps));
}

void BM_StepLinear(benchmark::State& state) {
  run_steps(state, 0.0, kernel::KernelSpec::zero(), static_cast<std::size_t>(state.range(0)), 1000);
}
BENCHMARK(BM_StepLinear)->Arg(8)->Arg(32)->Arg(64);

void BM_StepNonlinear(benchmark::State& state) {
  run_steps(state, 1.0, kernel::KernelSpec::zero(), static_cast<std::size_t>(state.range(0)), 1000);
}
BENCHMARK(BM_StepNonlinear)->Arg(8)->Arg(32)->Arg(64);

void BM_StepWithMemory(benchmark::State& state) {
  run_steps(state, 1.0, kernel::KernelSpec::abel(0.5, 0.1), 16, static_cast<std::size_t>(state.range(0)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StepWithMemory)->Arg(500)->Arg(1000)->Arg(2000)->Complexity(benchmark::oNSquared);

void BM_TensorContract(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto op = interval(n);
  const auto s = small_data(n);
  std::vector<double> out(n);
  for (auto _ : state) {
    op.ops->tensor.contract(s.xi_t, s.xi_tt, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_TensorContract)->Arg(8)->Arg(32)->Arg(64)->Arg(128);

void BM_ConvolveHistory(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto w = kernel::quadrature_weights(kernel::KernelSpec::abel(0.5, 1.0), 1e-3, m + 1);
  const std::vector<std::vector<double>> history(m + 1, std::vector<double>(16, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(kernel::convolve_history(w, history, m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvolveHistory)->Range(64, 8192)->Complexity(benchmark::oN);

void BM_AssembleSquare(benchmark::State& state) {
  const auto basis = spectral::eigenpairs(spectral::DomainSpec({std::numbers::pi, std::numbers::pi}),
                                          static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral::triple_product_tensor(basis));
}
BENCHMARK(BM_AssembleSquare)->Arg(8)->Arg(16)->Arg(32);

void BM_VerifyInequalities(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(diagnostics::verify_inequalities(20, dim, 7));
}
BENCHMARK(BM_VerifyInequalities)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
