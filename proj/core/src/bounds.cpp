#include "fjmgt/bounds.hpp"

#include <cmath>
#include <cstdio>

#include <boost/math/tools/roots.hpp>

namespace fjmgt::bounds {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error(std::string(what) + " must be > 0");
}

}  // namespace

CProfile CProfile::constant(double c0) {
  require_positive(c0, "C0");
  return CProfile(Kind::Constant, c0);
}

CProfile CProfile::affine(double c0) {
  require_positive(c0, "C0");
  return CProfile(Kind::Affine, c0);
}

double CProfile::operator()(double T) const {
  return kind_ == Kind::Constant ? c0_ : c0_ * (1.0 + T);
}

std::string CProfile::describe() const {
  char buf[64];
  if (kind_ == Kind::Constant)
    std::snprintf(buf, sizeof buf, "constant(%.17g)", c0_);
  else
    std::snprintf(buf, sizeof buf, "affine(%.17g)", c0_);
  return buf;
}

void BoundsQuery::validate() const {
  require_positive(n0, "N0");
  require_positive(z0_scale, "z0 scale");
}

double blowup_time(double z0, double C) {
  require_positive(z0, "z0");
  require_positive(C, "C");
  return 2.0 * std::log1p(1.0 / (std::sqrt(z0) * C));
}

ZValue gronwall_z(double z0, double C, double t) {
  require_positive(z0, "z0");
  require_positive(C, "C");
  if (!(t >= 0.0)) throw std::domain_error("t must be >= 0");
  const double tb = blowup_time(z0, C);
  if (t >= tb) return Diverged{tb};
  const double decay = std::exp(-0.5 * t);
  const double denom = -decay / std::sqrt(z0) - C * std::expm1(-0.5 * t);
  if (denom >= 0.0) return Diverged{tb};
  return 1.0 / (denom * denom);
}

double t0(double n0, double C, double z0_scale) {
  require_positive(n0, "N0");
  require_positive(z0_scale, "z0 scale");
  return blowup_time(z0_scale * n0, C);
}

double t_star(const BoundsQuery& query) {
  query.validate();
  const double at_zero = t0(query.n0, query.c_of_t(0.0), query.z0_scale);
  if (query.c_of_t.kind() == CProfile::Kind::Constant) return at_zero;
  // T0 decreases in T, so T - T0(T) goes from -T0(0) to >= 0 on [0, T0(0)].
  return t_star(query, 0.0, at_zero);
}

double t_star(const BoundsQuery& query, double lo, double hi) {
  query.validate();
  if (!(lo < hi)) throw BracketError("bracket must satisfy lo < hi");
  auto f = [&](double T) { return T - t0(query.n0, query.c_of_t(T), query.z0_scale); };
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "T - T0(T) has no sign change on [%.17g, %.17g] (values %.6g, %.6g)", lo, hi,
                  flo, fhi);
    throw BracketError(buf);
  }
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, boost::math::tools::eps_tolerance<double>());
  return 0.5 * (a + b);
}

double log_energy_bound(double g0, double C, double t) {
  if (!(g0 >= 0.0)) throw std::domain_error("G0 must be >= 0");
  require_positive(C, "C");
  if (!(t >= 0.0)) throw std::domain_error("t must be >= 0");
  const double root = C * t + 2.0 * std::sqrt(std::log1p(g0));
  return std::expm1(0.25 * root * root);
}

std::vector<CurvePoint> t0_curve(const BoundsQuery& query, double t_max, std::size_t points) {
  query.validate();
  if (!(t_max > 0.0)) throw std::invalid_argument("curve range must be > 0");
  if (points < 2) throw std::invalid_argument("curve needs at least two points");
  std::vector<CurvePoint> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double T = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    out[i] = {T, t0(query.n0, query.c_of_t(T), query.z0_scale)};
  }
  return out;
}

}  // namespace fjmgt::bounds
