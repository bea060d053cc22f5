#include "fjmgt/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fjmgt::diagnostics {

namespace {

std::size_t sup_resolution(const spectral::SpectralBasis& basis) {
  int m = 1;
  for (int a = 0; a < basis.dim(); ++a) m = std::max(m, basis.max_index(a));
  return static_cast<std::size_t>(4 * m);
}

double safe_ratio(double lhs, double rhs) {
  if (lhs == 0.0) return 0.0;
  return lhs / rhs;
}

bool all_zero(std::span<const double> c) {
  return std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
}

void require_dim(const spectral::SpectralBasis& basis, int lo, int hi, const char* name) {
  if (basis.dim() < lo || basis.dim() > hi)
    throw std::invalid_argument(std::string(name) + " is not defined in this dimension");
}

}  // namespace

double brezis_gallouet_ratio(std::span<const double> coeffs, const spectral::SpectralBasis& basis) {
  require_dim(basis, 2, 2, "Brezis-Gallouet ratio");
  if (all_zero(coeffs)) return 0.0;
  const double sup = spectral::sup_norm(coeffs, basis, sup_resolution(basis));
  const double h1 = spectral::sobolev_norm(coeffs, 1.0, basis);
  const double h2 = spectral::sobolev_norm(coeffs, 2.0, basis);
  return safe_ratio(sup, h1 * std::sqrt(std::log1p(h2)) + 1.0);
}

double brezis_gallouet_wainger_ratio(std::span<const double> coeffs, const spectral::SpectralBasis& basis) {
  require_dim(basis, 3, 3, "Brezis-Gallouet-Wainger ratio");
  if (all_zero(coeffs)) return 0.0;
  const double sup = spectral::sup_norm(coeffs, basis, sup_resolution(basis));
  const double h32 = spectral::sobolev_norm(coeffs, 1.5, basis);
  const double h2 = spectral::sobolev_norm(coeffs, 2.0, basis);
  return safe_ratio(sup, h32 * std::sqrt(std::log1p(h2)) + 1.0);
}

double ladyzhenskaya_ratio(std::span<const double> coeffs, const spectral::SpectralBasis& basis) {
  require_dim(basis, 2, 3, "Ladyzhenskaya ratio");
  if (all_zero(coeffs)) return 0.0;
  const double d = basis.dim();
  const double l4 = spectral::l4_norm(coeffs, basis);
  const double l2 = spectral::sobolev_norm(coeffs, 0.0, basis);
  const double h1 = spectral::sobolev_norm(coeffs, 1.0, basis);
  return safe_ratio(l4, std::pow(l2, 1.0 - d / 4.0) * std::pow(h1, d / 4.0));
}

double l4_interpolation_ratio(std::span<const double> coeffs, const spectral::SpectralBasis& basis) {
  require_dim(basis, 3, 3, "L4 interpolation ratio");
  if (all_zero(coeffs)) return 0.0;
  const double l4 = spectral::l4_norm(coeffs, basis);
  const double h12 = spectral::sobolev_norm(coeffs, 0.5, basis);
  const double h1 = spectral::sobolev_norm(coeffs, 1.0, basis);
  return safe_ratio(l4, std::sqrt(h12) * std::sqrt(h1));
}

InequalityReport verify_inequalities(std::size_t samples, int dim, std::uint64_t seed) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("inequality checks need dim 2 or 3");
  if (samples == 0) throw std::invalid_argument("inequality checks need at least one sample");

  const std::size_t n_modes = dim == 2 ? 24 : 16;
  const auto basis = spectral::eigenpairs(spectral::DomainSpec(std::vector<double>(dim, std::numbers::pi)), n_modes);
  const auto eig = basis.eigenvalues();

  using RatioFn = double (*)(std::span<const double>, const spectral::SpectralBasis&);
  std::vector<std::pair<std::string, RatioFn>> checks;
  if (dim == 2) {
    checks = {{"brezis_gallouet", &brezis_gallouet_ratio}, {"ladyzhenskaya", &ladyzhenskaya_ratio}};
  } else {
    checks = {{"brezis_gallouet_wainger", &brezis_gallouet_wainger_ratio},
              {"ladyzhenskaya", &ladyzhenskaya_ratio},
              {"l4_interpolation", &l4_interpolation_ratio}};
  }

  InequalityReport report;
  report.dim = dim;
  report.samples = samples;
  report.seed = seed;
  report.n_modes = n_modes;
  for (const auto& [name, fn] : checks) report.results.push_back({name, 0.0, 0, {}});

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> decay(0.5, 1.5);
  std::vector<double> coeffs(n_modes);
  for (std::size_t s = 0; s < samples; ++s) {
    const double p = decay(rng);
    for (std::size_t k = 0; k < n_modes; ++k) coeffs[k] = normal(rng) * std::pow(1.0 + eig[k], -p);
    for (std::size_t c = 0; c < checks.size(); ++c) {
      const double r = checks[c].second(coeffs, basis);
      auto& res = report.results[c];
      res.ratios.push_back(r);
      if (r > res.max_ratio || s == 0) {
        res.max_ratio = r;
        res.argmax = s;
      }
    }
  }
  return report;
}

}  // namespace fjmgt::diagnostics
