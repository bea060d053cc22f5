#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fjmgt::spectral {

/// Raised when a sampling or quadrature grid is too coarse for the requested modes.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box (0, L_1) x ... x (0, L_d), d in {1, 2, 3}.
class DomainSpec {
 public:
  explicit DomainSpec(std::vector<double> lengths);

  static DomainSpec interval(double length) { return DomainSpec({length}); }

  int dim() const noexcept { return static_cast<int>(lengths_.size()); }
  std::span<const double> lengths() const noexcept { return lengths_; }
  double length(int axis) const { return lengths_.at(static_cast<std::size_t>(axis)); }

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;

 private:
  std::vector<double> lengths_;
};

/// Per-axis sine mode numbers; axes beyond dim() hold 0.
using MultiIndex = std::array<int, 3>;

/// L2-orthonormal Dirichlet-Laplace eigenbasis of a box:
///   v(x) = prod_a sqrt(2/L_a) sin(m_a pi x_a / L_a),  lambda = sum_a (m_a pi / L_a)^2.
/// Modes ascend in lambda; ties are broken lexicographically on the multi-index.
class SpectralBasis {
 public:
  SpectralBasis(DomainSpec domain, std::vector<MultiIndex> modes, std::vector<double> eigenvalues);

  const DomainSpec& domain() const noexcept { return domain_; }
  int dim() const noexcept { return domain_.dim(); }
  std::size_t size() const noexcept { return modes_.size(); }
  std::span<const MultiIndex> modes() const noexcept { return modes_; }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  const MultiIndex& mode(std::size_t k) const { return modes_.at(k); }
  double eigenvalue(std::size_t k) const { return eigenvalues_.at(k); }

  /// Largest sine mode number used along `axis`.
  int max_index(int axis) const;

  /// sqrt(2/L) sin(m pi x / L) along `axis`, and its x-derivative.
  double axis_value(int axis, int m, double x) const;
  double axis_derivative(int axis, int m, double x) const;

  /// v_k(x) for a point with dim() coordinates.
  double eval(std::size_t k, std::span<const double> x) const;

 private:
  DomainSpec domain_;
  std::vector<MultiIndex> modes_;
  std::vector<double> eigenvalues_;
};

/// The n lowest Dirichlet eigenpairs of the box.
SpectralBasis eigenpairs(const DomainSpec& domain, std::size_t n);

/// Dense symmetric tensor T_{ijl} = integral of v_i v_j v_l over the box.
class TripleTensor {
 public:
  TripleTensor(std::size_t n, std::vector<double> data);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j, std::size_t l) const {
    return data_[(i * n_ + j) * n_ + l];
  }
  std::span<const double> data() const noexcept { return data_; }

  /// out_j = sum_{i,l} a_i b_l T_{ijl}.
  void contract(std::span<const double> a, std::span<const double> b, std::span<double> out) const;

 private:
  std::size_t n_;
  std::vector<double> data_;
};

/// Closed-form integral of three normalized 1D sine modes over (0, L).
double sine_triple_integral(int a, int b, int c, double length);

/// Tensorized Gauss-Legendre assembly (axis by axis; the box factorizes).
/// Entries whose per-axis index sum is even are exactly zero.
TripleTensor triple_product_tensor(const SpectralBasis& basis);

/// Galerkin matrices in the eigenbasis plus the quadratic-term tensor.
struct AssembledOperators {
  std::size_t n = 0;
  std::vector<double> mass;       // n x n, row major (identity)
  std::vector<double> stiffness;  // n x n, row major (diag lambda)
  TripleTensor tensor{0, {}};
};

AssembledOperators assemble(const SpectralBasis& basis);

/// Quadrature-computed Gram matrix int v_i v_j (row major), for verification.
std::vector<double> gram_matrix(const SpectralBasis& basis, std::size_t points_per_axis);
/// Quadrature-computed stiffness int grad v_i . grad v_j (row major).
std::vector<double> stiffness_quadrature(const SpectralBasis& basis, std::size_t points_per_axis);

/// Scalar field on the box; receives dim() coordinates.
using Field = std::function<double(std::span<const double>)>;

/// Default Gauss-Legendre points per axis for projecting onto `basis`.
std::size_t default_projection_points(const SpectralBasis& basis);

/// L2 projection coefficients of f onto span(basis). Throws ResolutionError when
/// points_per_axis < 2 * max_index + 2 on some axis. points_per_axis = 0 picks the default.
std::vector<double> project(const Field& f, const SpectralBasis& basis, std::size_t points_per_axis = 0);

struct InitialCoefficients {
  std::vector<double> xi;
  std::vector<double> xi_t;
  std::vector<double> xi_tt;
};

InitialCoefficients project_initial_data(const Field& psi0, const Field& psi1, const Field& psi2,
                                         const SpectralBasis& basis, std::size_t points_per_axis = 0);

/// (sum_k (1 + lambda_k)^s c_k^2)^{1/2} for any real s (negative orders give dual norms).
double spectral_norm(std::span<const double> coeffs, std::span<const double> eigenvalues, double s);

/// Spectral fractional Sobolev norm H^s, s >= 0.
double sobolev_norm(std::span<const double> coeffs, double s, const SpectralBasis& basis);

/// (sum_k lambda_k^p c_k^2)^{1/2}: p = 1 gives ||grad u||, p = 2 gives ||Laplace u||.
double laplace_power_norm(std::span<const double> coeffs, std::span<const double> eigenvalues, double p);

/// Max |u| over the uniform tensor grid with `grid_resolution` intervals per axis
/// (a lower bound on the sup norm). Needs grid_resolution >= 4 * max_index per axis.
double sup_norm(std::span<const double> coeffs, const SpectralBasis& basis, std::size_t grid_resolution);

/// ||u||_{L^4} by the uniform trapezoidal rule, which is exact for u^4 when
/// intervals > 2 * max_index on every axis. intervals = 0 picks 2 * max_index + 2.
double l4_norm(std::span<const double> coeffs, const SpectralBasis& basis, std::size_t intervals = 0);

/// Values of u on a tensor grid given per-axis node lists (row major, axis 0 slowest).
std::vector<double> evaluate_on_grid(std::span<const double> coeffs, const SpectralBasis& basis,
                                     const std::vector<std::vector<double>>& axis_nodes);

// Tensor sidecar cache. The file carries a format version and the key
// (dim, lengths, n_modes); a mismatching or unreadable file yields nullopt.
inline constexpr std::uint32_t kTensorCacheVersion = 1;
void save_tensor_cache(const std::string& path, const SpectralBasis& basis, const TripleTensor& tensor);
std::optional<TripleTensor> load_tensor_cache(const std::string& path, const SpectralBasis& basis);

}  // namespace fjmgt::spectral
