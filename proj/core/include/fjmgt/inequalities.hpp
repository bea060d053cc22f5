#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fjmgt/spectral.hpp"

namespace fjmgt::diagnostics {

// Ratios lhs / rhs with the inequality constant dropped. A zero field gives 0.

/// ||u||_inf / (||u||_{H^1} sqrt(ln(1 + ||u||_{H^2})) + 1), d = 2.
double brezis_gallouet_ratio(std::span<const double> coeffs, const spectral::SpectralBasis& basis);
/// ||u||_inf / (||u||_{H^{3/2}} sqrt(ln(1 + ||u||_{H^2})) + 1), d = 3.
double brezis_gallouet_wainger_ratio(std::span<const double> coeffs, const spectral::SpectralBasis& basis);
/// ||u||_{L^4} / (||u||_{L^2}^{1-d/4} ||u||_{H^1}^{d/4}), d = 2, 3.
double ladyzhenskaya_ratio(std::span<const double> coeffs, const spectral::SpectralBasis& basis);
/// ||u||_{L^4} / (||u||_{H^{1/2}}^{1/2} ||u||_{H^1}^{1/2}), d = 3.
double l4_interpolation_ratio(std::span<const double> coeffs, const spectral::SpectralBasis& basis);

struct InequalityResult {
  std::string name;
  double max_ratio = 0.0;
  std::size_t argmax = 0;
  std::vector<double> ratios;
};

struct InequalityReport {
  int dim = 2;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t n_modes = 0;
  std::vector<InequalityResult> results;
};

/// Random trigonometric polynomials on (0, pi)^dim with coefficients
/// N(0,1) (1 + lambda)^{-p}, p drawn per sample from [0.5, 1.5].
/// d = 2: Brezis-Gallouet and Ladyzhenskaya; d = 3: Brezis-Gallouet-Wainger,
/// Ladyzhenskaya and L4 interpolation.
InequalityReport verify_inequalities(std::size_t samples, int dim, std::uint64_t seed);

}  // namespace fjmgt::diagnostics
