#pragma once

#include <cstddef>
#include <vector>

namespace fjmgt::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b].
Rule gauss_legendre(std::size_t n, double a, double b);

}  // namespace fjmgt::quadrature
