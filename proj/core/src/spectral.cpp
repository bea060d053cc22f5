#include "fjmgt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fjmgt/quadrature.hpp"

namespace fjmgt::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t checked_size(std::span<const double> coeffs, const SpectralBasis& basis) {
  if (coeffs.size() != basis.size())
    throw std::invalid_argument("coefficient vector length does not match the basis");
  return coeffs.size();
}

// Permutation-invariant eigenvalue: sum the per-axis terms in ascending order so
// that symmetric modes on cubes tie exactly.
double mode_eigenvalue(const DomainSpec& domain, const MultiIndex& m) {
  std::array<double, 3> terms{0.0, 0.0, 0.0};
  for (int a = 0; a < domain.dim(); ++a) {
    const double w = m[a] * kPi / domain.length(a);
    terms[a] = w * w;
  }
  std::sort(terms.begin(), terms.begin() + domain.dim());
  double sum = 0.0;
  for (int a = 0; a < domain.dim(); ++a) sum += terms[a];
  return sum;
}

// Per-axis table of phi_m(x_q), m = 1..max_m, for the given nodes.
std::vector<std::vector<double>> axis_table(const SpectralBasis& basis, int axis, int max_m,
                                            std::span<const double> nodes) {
  std::vector<std::vector<double>> table(static_cast<std::size_t>(max_m) + 1,
                                         std::vector<double>(nodes.size(), 0.0));
  for (int m = 1; m <= max_m; ++m)
    for (std::size_t q = 0; q < nodes.size(); ++q)
      table[m][q] = basis.axis_value(axis, m, nodes[q]);
  return table;
}

}  // namespace

DomainSpec::DomainSpec(std::vector<double> lengths) : lengths_(std::move(lengths)) {
  if (lengths_.empty() || lengths_.size() > 3)
    throw std::invalid_argument("domain dimension must be 1, 2 or 3");
  for (double L : lengths_)
    if (!(L > 0.0) || !std::isfinite(L))
      throw std::invalid_argument("domain side lengths must be > 0");
}

SpectralBasis::SpectralBasis(DomainSpec domain, std::vector<MultiIndex> modes,
                             std::vector<double> eigenvalues)
    : domain_(std::move(domain)), modes_(std::move(modes)), eigenvalues_(std::move(eigenvalues)) {
  if (modes_.size() != eigenvalues_.size())
    throw std::invalid_argument("one eigenvalue per mode is required");
}

int SpectralBasis::max_index(int axis) const {
  int m = 0;
  for (const auto& mode : modes_) m = std::max(m, mode[axis]);
  return m;
}

double SpectralBasis::axis_value(int axis, int m, double x) const {
  const double L = domain_.length(axis);
  return std::sqrt(2.0 / L) * std::sin(m * kPi * x / L);
}

double SpectralBasis::axis_derivative(int axis, int m, double x) const {
  const double L = domain_.length(axis);
  const double w = m * kPi / L;
  return std::sqrt(2.0 / L) * w * std::cos(w * x);
}

double SpectralBasis::eval(std::size_t k, std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim()))
    throw std::invalid_argument("point dimension does not match the domain");
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= axis_value(a, modes_[k][a], x[a]);
  return v;
}

SpectralBasis eigenpairs(const DomainSpec& domain, std::size_t n) {
  if (n < 1) throw std::invalid_argument("eigenpairs needs n >= 1");
  const int d = domain.dim();

  struct Entry {
    double lambda;
    MultiIndex m;
  };

  int bound = 1;
  while (true) {
    std::vector<Entry> entries;
    MultiIndex m{1, d > 1 ? 1 : 0, d > 2 ? 1 : 0};
    // Enumerate [1..bound]^d.
    while (true) {
      entries.push_back({mode_eigenvalue(domain, m), m});
      int a = d - 1;
      while (a >= 0 && m[a] == bound) {
        m[a] = 1;
        --a;
      }
      if (a < 0) break;
      ++m[a];
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
      if (x.lambda != y.lambda) return x.lambda < y.lambda;
      return x.m < y.m;
    });

    if (entries.size() >= n) {
      // Any mode outside the enumerated cube has some m_a >= bound + 1.
      double outside = std::numeric_limits<double>::infinity();
      for (int a = 0; a < d; ++a) {
        MultiIndex probe{d > 0 ? 1 : 0, d > 1 ? 1 : 0, d > 2 ? 1 : 0};
        probe[a] = bound + 1;
        outside = std::min(outside, mode_eigenvalue(domain, probe));
      }
      if (entries[n - 1].lambda < outside) {
        std::vector<MultiIndex> modes;
        std::vector<double> lambdas;
        for (std::size_t k = 0; k < n; ++k) {
          modes.push_back(entries[k].m);
          lambdas.push_back(entries[k].lambda);
        }
        return SpectralBasis(domain, std::move(modes), std::move(lambdas));
      }
    }
    bound *= 2;
  }
}

TripleTensor::TripleTensor(std::size_t n, std::vector<double> data) : n_(n), data_(std::move(data)) {
  if (data_.size() != n_ * n_ * n_) throw std::invalid_argument("tensor data must hold n^3 entries");
}

void TripleTensor::contract(std::span<const double> a, std::span<const double> b,
                            std::span<double> out) const {
  if (a.size() != n_ || b.size() != n_ || out.size() != n_)
    throw std::invalid_argument("tensor contraction size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (a[i] == 0.0) continue;
    const double* slab = data_.data() + i * n_ * n_;
    for (std::size_t j = 0; j < n_; ++j) {
      const double* row = slab + j * n_;
      double s = 0.0;
      for (std::size_t l = 0; l < n_; ++l) s += row[l] * b[l];
      out[j] += a[i] * s;
    }
  }
}

double sine_triple_integral(int a, int b, int c, double length) {
  // sin A sin B sin C = (sin(A+B-C) + sin(A-B+C) + sin(-A+B+C) - sin(A+B+C)) / 4
  // and int_0^pi sin(k x) dx = 2/k for odd k, 0 for even k.
  auto half_period = [](int k) -> double { return (k % 2 != 0) ? 2.0 / k : 0.0; };
  const double s = half_period(a + b - c) + half_period(a - b + c) + half_period(-a + b + c) -
                   half_period(a + b + c);
  // Rescale (0, pi) to (0, L) and apply the sqrt(2/L)^3 normalization.
  return 0.25 * s * (length / kPi) * std::pow(2.0 / length, 1.5);
}

TripleTensor triple_product_tensor(const SpectralBasis& basis) {
  const std::size_t n = basis.size();
  const int d = basis.dim();

  // One symmetric M^3 table per axis.
  std::vector<std::vector<double>> tables(static_cast<std::size_t>(d));
  std::vector<int> extents(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const int M = basis.max_index(a);
    extents[a] = M;
    const auto rule = quadrature::gauss_legendre(static_cast<std::size_t>(3 * M + 40), 0.0,
                                                 basis.domain().length(a));
    const auto phi = axis_table(basis, a, M, rule.nodes);
    auto& table = tables[a];
    const std::size_t s = static_cast<std::size_t>(M) + 1;
    table.assign(s * s * s, 0.0);
    for (int p = 1; p <= M; ++p)
      for (int q = p; q <= M; ++q)
        for (int r = q; r <= M; ++r) {
          double v = 0.0;
          if ((p + q + r) % 2 != 0) {
            for (std::size_t k = 0; k < rule.nodes.size(); ++k)
              v += rule.weights[k] * phi[p][k] * phi[q][k] * phi[r][k];
          }
          const int idx[6][3] = {{p, q, r}, {p, r, q}, {q, p, r}, {q, r, p}, {r, p, q}, {r, q, p}};
          for (const auto& perm : idx)
            table[(perm[0] * s + perm[1]) * s + perm[2]] = v;
        }
  }

  std::vector<double> data(n * n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) {
        double v = 1.0;
        for (int a = 0; a < d; ++a) {
          const std::size_t s = static_cast<std::size_t>(extents[a]) + 1;
          v *= tables[a][(basis.mode(i)[a] * s + basis.mode(j)[a]) * s + basis.mode(l)[a]];
        }
        data[(i * n + j) * n + l] = v;
      }
  return TripleTensor(n, std::move(data));
}

AssembledOperators assemble(const SpectralBasis& basis) {
  AssembledOperators ops;
  ops.n = basis.size();
  ops.mass.assign(ops.n * ops.n, 0.0);
  ops.stiffness.assign(ops.n * ops.n, 0.0);
  for (std::size_t i = 0; i < ops.n; ++i) {
    ops.mass[i * ops.n + i] = 1.0;
    ops.stiffness[i * ops.n + i] = basis.eigenvalue(i);
  }
  ops.tensor = triple_product_tensor(basis);
  return ops;
}

namespace {

// int over the box of f_i g_j where each factor is a product of per-axis terms.
template <typename AxisFn>
std::vector<double> separable_pairing(const SpectralBasis& basis, std::size_t points, AxisFn&& axis_pair) {
  const std::size_t n = basis.size();
  const int d = basis.dim();
  std::vector<std::vector<double>> pair_tables(static_cast<std::size_t>(d));
  std::vector<std::size_t> extents(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const int M = basis.max_index(a);
    extents[a] = static_cast<std::size_t>(M) + 1;
    const auto rule = quadrature::gauss_legendre(points, 0.0, basis.domain().length(a));
    auto& t = pair_tables[a];
    t.assign(extents[a] * extents[a], 0.0);
    for (int p = 1; p <= M; ++p)
      for (int q = 1; q <= M; ++q) {
        double v = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k)
          v += rule.weights[k] * axis_pair(a, p, q, rule.nodes[k]);
        t[p * extents[a] + q] = v;
      }
  }
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = 1.0;
      for (int a = 0; a < d; ++a)
        v *= pair_tables[a][basis.mode(i)[a] * extents[a] + basis.mode(j)[a]];
      out[i * n + j] = v;
    }
  return out;
}

}  // namespace

std::vector<double> gram_matrix(const SpectralBasis& basis, std::size_t points_per_axis) {
  return separable_pairing(basis, points_per_axis, [&](int a, int p, int q, double x) {
    return basis.axis_value(a, p, x) * basis.axis_value(a, q, x);
  });
}

std::vector<double> stiffness_quadrature(const SpectralBasis& basis, std::size_t points_per_axis) {
  const std::size_t n = basis.size();
  const int d = basis.dim();
  std::vector<double> out(n * n, 0.0);
  // grad v_i . grad v_j = sum over the differentiated axis b of
  // (phi'_b phi'_b) * prod_{a != b} (phi_a phi_a).
  for (int b = 0; b < d; ++b) {
    const auto deriv = separable_pairing(basis, points_per_axis, [&](int a, int p, int q, double x) {
      if (a == b) return basis.axis_derivative(a, p, x) * basis.axis_derivative(a, q, x);
      return basis.axis_value(a, p, x) * basis.axis_value(a, q, x);
    });
    for (std::size_t k = 0; k < n * n; ++k) out[k] += deriv[k];
  }
  return out;
}

std::size_t default_projection_points(const SpectralBasis& basis) {
  int M = 0;
  for (int a = 0; a < basis.dim(); ++a) M = std::max(M, basis.max_index(a));
  const std::size_t base = static_cast<std::size_t>(4 * M + 32);
  return basis.dim() == 3 ? std::min<std::size_t>(base, 64) : base;
}

std::vector<double> project(const Field& f, const SpectralBasis& basis, std::size_t points_per_axis) {
  const int d = basis.dim();
  const std::size_t points = points_per_axis == 0 ? default_projection_points(basis) : points_per_axis;
  for (int a = 0; a < d; ++a) {
    const auto floor = static_cast<std::size_t>(2 * basis.max_index(a) + 2);
    if (points < floor)
      throw ResolutionError("projection grid has " + std::to_string(points) +
                            " points per axis; modes need at least " + std::to_string(floor));
  }

  std::vector<quadrature::Rule> rules;
  std::vector<std::vector<std::vector<double>>> phi;
  for (int a = 0; a < d; ++a) {
    rules.push_back(quadrature::gauss_legendre(points, 0.0, basis.domain().length(a)));
    phi.push_back(axis_table(basis, a, basis.max_index(a), rules.back().nodes));
  }

  const std::size_t n = basis.size();
  std::vector<double> coeffs(n, 0.0);
  std::array<std::size_t, 3> q{0, 0, 0};
  std::vector<double> x(static_cast<std::size_t>(d));
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= points;

  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int a = d - 1; a >= 0; --a) {
      q[a] = rem % points;
      rem /= points;
    }
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      x[a] = rules[a].nodes[q[a]];
      w *= rules[a].weights[q[a]];
    }
    const double fw = f(x) * w;
    if (fw == 0.0) continue;
    for (std::size_t k = 0; k < n; ++k) {
      double v = fw;
      for (int a = 0; a < d; ++a) v *= phi[a][basis.mode(k)[a]][q[a]];
      coeffs[k] += v;
    }
  }
  return coeffs;
}

InitialCoefficients project_initial_data(const Field& psi0, const Field& psi1, const Field& psi2,
                                         const SpectralBasis& basis, std::size_t points_per_axis) {
  return {project(psi0, basis, points_per_axis), project(psi1, basis, points_per_axis),
          project(psi2, basis, points_per_axis)};
}

double spectral_norm(std::span<const double> coeffs, std::span<const double> eigenvalues, double s) {
  if (coeffs.size() != eigenvalues.size())
    throw std::invalid_argument("coefficient vector length does not match the eigenvalues");
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    sum += std::pow(1.0 + eigenvalues[k], s) * coeffs[k] * coeffs[k];
  }
  return std::sqrt(sum);
}

double sobolev_norm(std::span<const double> coeffs, double s, const SpectralBasis& basis) {
  if (!(s >= 0.0)) throw std::invalid_argument("Sobolev order s must be >= 0");
  checked_size(coeffs, basis);
  return spectral_norm(coeffs, basis.eigenvalues(), s);
}

double laplace_power_norm(std::span<const double> coeffs, std::span<const double> eigenvalues, double p) {
  if (coeffs.size() != eigenvalues.size())
    throw std::invalid_argument("coefficient vector length does not match the eigenvalues");
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    sum += std::pow(eigenvalues[k], p) * coeffs[k] * coeffs[k];
  }
  return std::sqrt(sum);
}

std::vector<double> evaluate_on_grid(std::span<const double> coeffs, const SpectralBasis& basis,
                                     const std::vector<std::vector<double>>& axis_nodes) {
  const std::size_t n = checked_size(coeffs, basis);
  const int d = basis.dim();
  if (axis_nodes.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("one node list per axis is required");

  std::vector<std::vector<std::vector<double>>> phi;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) {
    phi.push_back(axis_table(basis, a, basis.max_index(a), axis_nodes[a]));
    total *= axis_nodes[a].size();
  }

  std::vector<double> values(total, 0.0);
  if (d == 1) {
    for (std::size_t k = 0; k < n; ++k) {
      if (coeffs[k] == 0.0) continue;
      const auto& p0 = phi[0][basis.mode(k)[0]];
      for (std::size_t q = 0; q < total; ++q) values[q] += coeffs[k] * p0[q];
    }
    return values;
  }

  const std::size_t n0 = axis_nodes[0].size();
  const std::size_t n1 = axis_nodes[1].size();
  const std::size_t n2 = d == 3 ? axis_nodes[2].size() : 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (coeffs[k] == 0.0) continue;
    const auto& m = basis.mode(k);
    const auto& p0 = phi[0][m[0]];
    const auto& p1 = phi[1][m[1]];
    for (std::size_t i = 0; i < n0; ++i) {
      const double c0 = coeffs[k] * p0[i];
      for (std::size_t j = 0; j < n1; ++j) {
        const double c01 = c0 * p1[j];
        double* out = values.data() + (i * n1 + j) * n2;
        if (d == 2) {
          out[0] += c01;
        } else {
          const auto& p2 = phi[2][m[2]];
          for (std::size_t l = 0; l < n2; ++l) out[l] += c01 * p2[l];
        }
      }
    }
  }
  return values;
}

double sup_norm(std::span<const double> coeffs, const SpectralBasis& basis, std::size_t grid_resolution) {
  checked_size(coeffs, basis);
  std::vector<std::vector<double>> nodes;
  for (int a = 0; a < basis.dim(); ++a) {
    const auto floor = static_cast<std::size_t>(4 * basis.max_index(a));
    if (grid_resolution < floor)
      throw ResolutionError("sup-norm grid resolution " + std::to_string(grid_resolution) +
                            " is below 4x the highest mode number (" + std::to_string(floor) + ")");
    const double L = basis.domain().length(a);
    std::vector<double> axis(grid_resolution + 1);
    for (std::size_t i = 0; i <= grid_resolution; ++i)
      axis[i] = L * static_cast<double>(i) / static_cast<double>(grid_resolution);
    nodes.push_back(std::move(axis));
  }
  const auto values = evaluate_on_grid(coeffs, basis, nodes);
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double l4_norm(std::span<const double> coeffs, const SpectralBasis& basis, std::size_t intervals) {
  checked_size(coeffs, basis);
  const int d = basis.dim();
  std::vector<std::vector<double>> nodes;
  double cell = 1.0;
  for (int a = 0; a < d; ++a) {
    const auto M = static_cast<std::size_t>(basis.max_index(a));
    const std::size_t N = intervals == 0 ? 2 * M + 2 : intervals;
    if (N <= 2 * M)
      throw ResolutionError("L4 quadrature needs more than 2x the highest mode number of intervals");
    const double L = basis.domain().length(a);
    // Interior nodes only: u vanishes on the boundary.
    std::vector<double> axis;
    for (std::size_t i = 1; i < N; ++i) axis.push_back(L * static_cast<double>(i) / static_cast<double>(N));
    nodes.push_back(std::move(axis));
    cell *= L / static_cast<double>(N);
  }
  const auto values = evaluate_on_grid(coeffs, basis, nodes);
  double sum = 0.0;
  for (double v : values) {
    const double v2 = v * v;
    sum += v2 * v2;
  }
  return std::pow(sum * cell, 0.25);
}

}  // namespace fjmgt::spectral
