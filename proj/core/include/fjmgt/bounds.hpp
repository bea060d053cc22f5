#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fjmgt::bounds {

/// The comparison solution has left its interval of existence.
struct Diverged {
  double blowup_time = 0.0;
};

using ZValue = std::variant<double, Diverged>;

/// No sign change of T - T0(T) on the bracket.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constant C(T) = c0, or affine C(T) = c0 (1 + T).
class CProfile {
 public:
  enum class Kind { Constant, Affine };

  static CProfile constant(double c0);
  static CProfile affine(double c0);

  Kind kind() const noexcept { return kind_; }
  double c0() const noexcept { return c0_; }
  double operator()(double T) const;
  std::string describe() const;

 private:
  CProfile(Kind kind, double c0) : kind_(kind), c0_(c0) {}
  Kind kind_;
  double c0_;
};

struct BoundsQuery {
  double n0 = 1.0;
  CProfile c_of_t = CProfile::constant(1.0);
  double z0_scale = 1.0;

  double z0() const { return z0_scale * n0; }
  void validate() const;
};

/// Closed-form solution of z' = z + C z^{3/2}, z(0) = z0.
ZValue gronwall_z(double z0, double C, double t);

/// Blow-up time 2 log((z0^{-1/2} + C) / C).
double blowup_time(double z0, double C);

/// T0 with z0 = z0_scale * n0.
double t0(double n0, double C, double z0_scale = 1.0);

/// sup_T min{T, T0(n0, T)}: T0 itself for constant C, otherwise the fixed point of T = T0(n0, T).
double t_star(const BoundsQuery& query);
/// Fixed point on an explicit bracket; throws BracketError when T - T0(T) does not change sign.
double t_star(const BoundsQuery& query, double lo, double hi);

/// exp((C t + 2 sqrt(ln(1 + G0)))^2 / 4) - 1.
double log_energy_bound(double g0, double C, double t);

struct CurvePoint {
  double T = 0.0;
  double T0 = 0.0;
};

/// Samples of (T, T0(n0, T)) on a uniform grid of `points` values in [0, t_max].
std::vector<CurvePoint> t0_curve(const BoundsQuery& query, double t_max, std::size_t points);

}  // namespace fjmgt::bounds
