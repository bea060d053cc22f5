#include "fjmgt/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fjmgt::kernel {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Abel: return "abel";
    case KernelKind::Exponential: return "exponential";
    case KernelKind::Zero: return "zero";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "abel") return KernelKind::Abel;
  if (name == "exponential") return KernelKind::Exponential;
  if (name == "zero") return KernelKind::Zero;
  throw std::invalid_argument("unknown kernel kind '" + name + "' (expected abel|exponential|zero)");
}

KernelSpec::KernelSpec(KernelKind kind, double alpha, double rate, double scale, double delta)
    : kind_(kind), alpha_(alpha), rate_(rate), scale_(scale), delta_(delta) {}

KernelSpec KernelSpec::abel(double alpha, double delta) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("Abel order alpha must lie in (0,1)");
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("delta must be >= 0");
  return KernelSpec(KernelKind::Abel, alpha, 0.0, 0.0, delta);
}

KernelSpec KernelSpec::exponential(double rate, double scale, double delta) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("exponential kernel rate must be > 0");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("exponential kernel scale must be > 0");
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("delta must be >= 0");
  return KernelSpec(KernelKind::Exponential, 0.0, rate, scale, delta);
}

KernelSpec KernelSpec::zero() { return KernelSpec(KernelKind::Zero, 0.0, 0.0, 0.0, 0.0); }

double eval_kernel(const KernelSpec& spec, double t) {
  if (!(t > 0.0)) throw std::domain_error("kernel is only evaluated for t > 0");
  switch (spec.kind()) {
    case KernelKind::Abel:
      return std::pow(t, -spec.alpha()) / std::tgamma(1.0 - spec.alpha());
    case KernelKind::Exponential:
      return spec.scale() * std::exp(-spec.rate() * t);
    case KernelKind::Zero:
      return 0.0;
  }
  return 0.0;
}

double kernel_integral(const KernelSpec& spec, double t) {
  if (t < 0.0) throw std::domain_error("kernel integral needs t >= 0");
  switch (spec.kind()) {
    case KernelKind::Abel:
      return std::pow(t, 1.0 - spec.alpha()) / std::tgamma(2.0 - spec.alpha());
    case KernelKind::Exponential:
      return -spec.scale() / spec.rate() * std::expm1(-spec.rate() * t);
    case KernelKind::Zero:
      return 0.0;
  }
  return 0.0;
}

QuadratureWeights::QuadratureWeights(double dt, std::vector<double> moments)
    : dt_(dt), moments_(std::move(moments)) {}

QuadratureWeights quadrature_weights(const KernelSpec& spec, double dt, std::size_t n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("quadrature step dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("quadrature needs n_steps >= 1");

  std::vector<double> moments(n_steps, 0.0);
  switch (spec.kind()) {
    case KernelKind::Abel: {
      const double a = 1.0 - spec.alpha();
      const double factor = std::pow(dt, a) / std::tgamma(2.0 - spec.alpha());
      double prev = 0.0;  // j^{1-alpha}
      for (std::size_t j = 0; j < n_steps; ++j) {
        const double next = std::pow(static_cast<double>(j + 1), a);
        moments[j] = (next - prev) * factor;
        prev = next;
      }
      break;
    }
    case KernelKind::Exponential: {
      // scale/rate * e^{-rate j dt} * (1 - e^{-rate dt})
      const double cell = -spec.scale() / spec.rate() * std::expm1(-spec.rate() * dt);
      for (std::size_t j = 0; j < n_steps; ++j)
        moments[j] = cell * std::exp(-spec.rate() * dt * static_cast<double>(j));
      break;
    }
    case KernelKind::Zero:
      break;
  }
  return QuadratureWeights(dt, std::move(moments));
}

namespace {

std::size_t checked_dimension(const QuadratureWeights& weights,
                              std::span<const std::vector<double>> history, std::size_t m) {
  if (m >= history.size()) throw std::out_of_range("convolution index beyond stored history");
  if (m >= weights.size()) throw std::out_of_range("quadrature weights do not cover the requested lag");
  const std::size_t dim = history[0].size();
  for (std::size_t j = 0; j <= m; ++j)
    if (history[j].size() != dim)
      throw std::invalid_argument("history vectors must share one dimension");
  return dim;
}

}  // namespace

std::vector<double> convolve_history(const QuadratureWeights& weights,
                                     std::span<const std::vector<double>> history,
                                     std::size_t m) {
  const std::size_t dim = checked_dimension(weights, history, m);
  std::vector<double> out(dim, 0.0);
  accumulate_retarded(weights, history, m, out);
  const double w0 = weights[0];
  for (std::size_t i = 0; i < dim; ++i) out[i] += w0 * history[m][i];
  return out;
}

void accumulate_retarded(const QuadratureWeights& weights,
                         std::span<const std::vector<double>> history,
                         std::size_t m,
                         std::span<double> out) {
  const std::size_t dim = checked_dimension(weights, history, m);
  if (out.size() != dim) throw std::invalid_argument("output dimension does not match history");
  for (std::size_t j = 0; j < m; ++j) {
    const double w = weights[m - j];
    const auto& y = history[j];
    for (std::size_t i = 0; i < dim; ++i) out[i] += w * y[i];
  }
}

CoercivityReport check_coercivity(const KernelSpec& spec,
                                  std::span<const std::vector<double>> signal,
                                  double dt) {
  if (signal.empty()) throw std::invalid_argument("coercivity check needs a nonempty signal");
  if (!(dt > 0.0)) throw std::invalid_argument("coercivity check needs dt > 0");

  const auto weights = quadrature_weights(spec, dt, signal.size());
  CoercivityReport report;
  for (std::size_t m = 0; m < signal.size(); ++m) {
    const auto conv = convolve_history(weights, signal, m);
    double inner = 0.0;
    double conv_sq = 0.0;
    double y_sq = 0.0;
    for (std::size_t i = 0; i < conv.size(); ++i) {
      inner += conv[i] * signal[m][i];
      conv_sq += conv[i] * conv[i];
      y_sq += signal[m][i] * signal[m][i];
    }
    report.lhs += dt * inner;
    report.rhs += dt * conv_sq;
    report.signal_energy += dt * y_sq;
  }
  if (report.rhs > 0.0) report.c_estimate = report.lhs / report.rhs;
  return report;
}

std::vector<std::vector<double>> random_piecewise_signal(std::uint64_t seed, std::size_t length) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> block(1, 20);
  std::vector<std::vector<double>> y;
  y.reserve(length);
  while (y.size() < length) {
    const double v = value(rng);
    const std::size_t b = block(rng);
    for (std::size_t i = 0; i < b && y.size() < length; ++i) y.push_back({v});
  }
  return y;
}

CoercivitySummary verify_coercivity(const KernelSpec& spec, std::size_t samples, std::uint64_t seed,
                                    std::size_t length, double dt) {
  if (samples == 0) throw std::invalid_argument("coercivity corpus needs at least one sample");
  if (length == 0) throw std::invalid_argument("coercivity signals need a positive length");
  CoercivitySummary summary;
  summary.samples = samples;
  summary.seed = seed;
  summary.length = length;
  summary.dt = dt;
  summary.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const auto y = random_piecewise_signal(seed + i, length);
    const auto r = check_coercivity(spec, y, dt);
    if (r.lhs < -1e-12 * r.signal_energy) ++summary.violations;
    if (r.signal_energy > 0.0) summary.min_margin = std::min(summary.min_margin, r.lhs / r.signal_energy);
    if (r.vacuous())
      ++summary.vacuous;
    else
      summary.min_c_estimate = std::min(summary.min_c_estimate.value_or(*r.c_estimate), *r.c_estimate);
  }
  return summary;
}

}  // namespace fjmgt::kernel
