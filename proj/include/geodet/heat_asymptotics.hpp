#pragma once

// Lowest-order short-time heat-kernel limits and the spectral-sum heat kernel
// of round spheres used to confirm them.
//
// For a nondegenerate pair (x, y),   p_t / e_t -> det J(1)^{-1/2}.
// For antipodal points on S^n_R the minimizers form an (n-1)-sphere and
//   (4 pi t)^{(n-1)/2} p_t / e_t -> 2 pi^{3n/2 - 1} R^{n-1} / Gamma(n/2).
//
// At the antipode p_t is of size exp(-pi^2 R^2 / 4t) while individual terms of
// the eigenfunction expansion are O(t^{-n/2}); the oracle therefore runs in
// extended precision.

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "geodet/errors.hpp"
#include "geodet/extrapolation.hpp"
#include "geodet/gelfand_yaglom.hpp"
#include "geodet/model_geometry.hpp"

namespace geodet {

/// 160 significant decimal digits: enough for exp(-pi^2/(4 t)) cancellation down to t = 0.01.
using OracleReal = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160>>;

/// e_t(d) = (4 pi t)^{-n/2} exp(-d^2 / 4t).
inline double euclidean_heat_kernel(double d, int n, double t) {
  require(std::isfinite(t) && t > 0.0, ErrorKind::Domain, "time must be positive");
  require(std::isfinite(d) && d >= 0.0, ErrorKind::Domain, "distance must be non-negative");
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * n) * std::exp(-d * d / (4.0 * t));
}

/// det J(1)^{-1/2} along the minimizing geodesic of length d.
inline double nondegenerate_limit_prediction(const ModelManifold& m, double d,
                                             int steps = kDefaultOdeSteps) {
  require(std::isfinite(d) && d >= 0.0, ErrorKind::Domain, "distance must be non-negative");
  if (m.is_constant_curvature() && d >= m.conjugate_distance()) {
    throw Error(ErrorKind::DegenerateRoute, "points are conjugate; use the degenerate route");
  }
  const JacobiSystem sys = jacobi_endomorphism({m, d});
  const JacobiPropagation prop = solve_jacobi_ode(sys, steps);
  if (min_scaled_determinant(prop) <= kDegeneracyThreshold) {
    throw Error(ErrorKind::DegenerateRoute, "minimizing geodesic is degenerate");
  }
  return std::pow(prop.final_J().determinant(), -0.5);
}

/// vol(S^{k}) of the unit k-sphere.
inline double unit_sphere_volume(int k) {
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// 2 pi^{3n/2 - 1} R^{n-1} / Gamma(n/2).
inline double antipodal_sphere_limit_closed_form(int n, double R) {
  require(n >= 2, ErrorKind::OutOfScope, "antipodal limit needs n >= 2");
  require(R > 0.0, ErrorKind::Domain, "radius must be positive");
  return 2.0 * std::pow(std::numbers::pi, 1.5 * n - 1.0) * std::pow(R, n - 1) / std::tgamma(0.5 * n);
}

/// int over S_xy of |det J'(1)|^{1/2}; S_xy is the sphere of radius pi R in T_x M
/// and the integrand is constant on it.
inline double antipodal_limit_via_Sxy(int n, double R, int steps = kDefaultOdeSteps) {
  require(n >= 2, ErrorKind::OutOfScope, "antipodal limit needs n >= 2");
  require(R > 0.0, ErrorKind::Domain, "radius must be positive");
  const double speed = std::numbers::pi * R;
  const JacobiSystem sys = jacobi_endomorphism({ModelManifold::sphere(n, R), speed});
  const JacobiPropagation prop = solve_jacobi_ode(sys, steps);
  const double integrand = std::sqrt(std::abs(prop.final_Jprime().determinant()));
  return integrand * unit_sphere_volume(n - 1) * std::pow(speed, n - 1);
}

// ---------------------------------------------------------------------------
// spectral-sum oracle

/// Laplace-Beltrami spectrum of S^n_R up to degree L with zonal kernels
///   Z_l(theta) = dim H_l / vol(S^n_R) * C_l^{(n-1)/2}(cos theta) / C_l^{(n-1)/2}(1)
/// (Fourier cosines on the circle).
template <typename Real>
class SphereSpectrum {
 public:
  SphereSpectrum(int n, Real radius, int max_degree) : n_(n), radius_(radius), max_degree_(max_degree) {
    require(n >= 1, ErrorKind::Domain, "sphere dimension must be positive");
    require(radius > 0, ErrorKind::Domain, "radius must be positive");
    require(max_degree >= 0, ErrorKind::Domain, "degree must be non-negative");
    const Real pi = boost::math::constants::pi<Real>();
    using std::pow;
    using boost::multiprecision::pow;
    const Real h = Real(n + 1) / 2;
    volume_ = 2 * pow(pi, h) / boost::math::tgamma(h) * pow(radius, n);
    eigenvalues_.resize(max_degree + 1);
    multiplicities_.resize(max_degree + 1);
    for (int l = 0; l <= max_degree; ++l) {
      eigenvalues_[l] = Real(l) * Real(l + n - 1) / (radius * radius);
      multiplicities_[l] = multiplicity(n, l);
    }
  }

  int n() const { return n_; }
  const Real& radius() const { return radius_; }
  int max_degree() const { return max_degree_; }
  const Real& volume() const { return volume_; }
  const std::vector<Real>& eigenvalues() const { return eigenvalues_; }
  const std::vector<Real>& multiplicities() const { return multiplicities_; }

  /// Z_l(theta) for l = 0..L.
  std::vector<Real> zonal_values(const Real& theta) const {
    using std::cos;
    using boost::multiprecision::cos;
    std::vector<Real> z(max_degree_ + 1);
    if (n_ == 1) {
      // cos(l theta) by the Chebyshev recurrence
      const Real c = cos(theta);
      Real c_prev = 1, c_cur = c;
      z[0] = 1 / volume_;
      for (int l = 1; l <= max_degree_; ++l) {
        if (l > 1) {
          const Real next = 2 * c * c_cur - c_prev;
          c_prev = c_cur;
          c_cur = next;
        }
        z[l] = 2 * c_cur / volume_;
      }
      return z;
    }
    // normalized Gegenbauer recurrence P_l = C_l(x) / C_l(1), alpha = (n-1)/2:
    //   P_l = (2x (l + alpha - 1) P_{l-1} - (l - 1) P_{l-2}) / (l + 2 alpha - 1)
    const Real x = cos(theta);
    const Real alpha = Real(n_ - 1) / 2;
    Real p_prev = 1, p = x;
    for (int l = 0; l <= max_degree_; ++l) {
      Real value;
      if (l == 0) {
        value = 1;
      } else if (l == 1) {
        value = x;
      } else {
        const Real next = (2 * x * (Real(l) + alpha - 1) * p - Real(l - 1) * p_prev) /
                          (Real(l) + 2 * alpha - 1);
        p_prev = p;
        p = next;
        value = next;
      }
      z[l] = multiplicities_[l] * value / volume_;
    }
    return z;
  }

 private:
  static Real multiplicity(int n, int l) {
    if (n == 1) return l == 0 ? Real(1) : Real(2);
    // (2l + n - 1) (l + n - 2)! / (l! (n - 1)!)
    Real binom = 1;  // C(l + n - 2, l)
    for (int j = 1; j <= l; ++j) binom = binom * Real(j + n - 2) / Real(j);
    return binom * Real(2 * l + n - 1) / Real(n - 1);
  }

  int n_;
  Real radius_;
  int max_degree_;
  Real volume_;
  std::vector<Real> eigenvalues_;
  std::vector<Real> multiplicities_;
};

template <typename Real>
struct HeatKernelValue {
  Real value;
  Real truncation_bound;  // bound on the last retained term
};

inline constexpr double kOracleTruncation = 1e-14;

/// p_t(theta) = sum_{l <= L} exp(-lambda_l t) Z_l(theta).
template <typename Real>
HeatKernelValue<Real> sphere_heat_kernel(const SphereSpectrum<Real>& spec, const Real& theta,
                                         const Real& t) {
  using std::abs;
  using std::exp;
  using boost::multiprecision::abs;
  using boost::multiprecision::exp;
  require(t > 0, ErrorKind::Domain, "time must be positive");
  const std::vector<Real> z = spec.zonal_values(theta);
  Real sum = 0;
  for (int l = spec.max_degree(); l >= 0; --l) sum += exp(-spec.eigenvalues()[l] * t) * z[l];
  const int L = spec.max_degree();
  const Real bound = exp(-spec.eigenvalues()[L] * t) * spec.multiplicities()[L] / spec.volume();
  if (!(bound < Real(kOracleTruncation) * abs(sum))) {
    throw Error(ErrorKind::InsufficientDegree,
                "degree " + std::to_string(L) + " does not resolve the heat kernel");
  }
  return {sum, bound};
}

/// Smallest degree whose term bound falls below `relative` times `scale`.
template <typename Real>
int oracle_degree(int n, const Real& radius, const Real& t, const Real& scale, double relative) {
  using std::exp;
  using boost::multiprecision::exp;
  int L = 8;
  for (;; L += 8) {
    const SphereSpectrum<Real> s(n, radius, L);
    const Real bound = exp(-s.eigenvalues()[L] * t) * s.multiplicities()[L] / s.volume();
    if (bound < Real(relative) * scale) return L;
    require(L < 100000, ErrorKind::InsufficientDegree, "oracle degree search did not terminate");
  }
}

/// Heat kernel at angle theta and time t with the degree chosen from the tail bound.
template <typename Real>
Real sphere_heat_kernel_adaptive(int n, const Real& radius, const Real& theta, const Real& t) {
  using std::exp;
  using boost::multiprecision::exp;
  // the kernel is at least of the size of its Gaussian factor
  const Real d = radius * theta;
  const Real pi = boost::math::constants::pi<Real>();
  using std::pow;
  using boost::multiprecision::pow;
  const Real scale = pow(4 * pi * t, -Real(n) / 2) * exp(-d * d / (4 * t)) * Real(1e-3);
  int L = oracle_degree<Real>(n, radius, t, scale, kOracleTruncation * 1e-2);
  for (int attempt = 0; attempt < 6; ++attempt, L *= 2) {
    try {
      return sphere_heat_kernel(SphereSpectrum<Real>(n, radius, L), theta, t).value;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientDegree) throw;
    }
  }
  throw Error(ErrorKind::InsufficientDegree, "oracle degree doubling failed");
}

enum class HeatCase { Nondegenerate, Antipodal };

struct HeatLimitReport {
  int n = 0;
  double R = 1.0;
  int k = 0;
  HeatCase heat_case = HeatCase::Nondegenerate;
  double distance = 0.0;
  double predicted = 0.0;
  std::vector<std::pair<double, double>> oracle_values;  // (t, scaled ratio)
  std::vector<std::vector<double>> richardson_rows;
  double extrapolated_oracle = 0.0;
  double rel_deviation = 0.0;
};

struct HeatGrid {
  double t0 = 0.2;
  int halvings = 4;  // t_j = t0 2^{-j}, j = 0..halvings
  int richardson_levels = 2;
};

/// (4 pi t)^{k/2} p_t / e_t at a single time, computed with the oracle.
inline double scaled_heat_ratio(int n, double R, double theta, double t, int k) {
  const OracleReal radius(R), angle(theta), time(t);
  const OracleReal p = sphere_heat_kernel_adaptive<OracleReal>(n, radius, angle, time);
  const OracleReal pi = boost::math::constants::pi<OracleReal>();
  const OracleReal d = radius * angle;
  using boost::multiprecision::exp;
  using boost::multiprecision::pow;
  const OracleReal e = pow(4 * pi * time, -OracleReal(n) / 2) * exp(-d * d / (4 * time));
  const OracleReal scaled = pow(4 * pi * time, OracleReal(k) / 2) * p / e;
  return static_cast<double>(scaled);
}

/// Compares the determinant-layer prediction with the Richardson-extrapolated oracle ratio.
/// For the nondegenerate case `distance` must be below pi R.
inline HeatLimitReport heat_limit_validation(int n, double R, HeatCase heat_case, double distance = 0.0,
                                             HeatGrid grid = {}) {
  require(n >= 1, ErrorKind::Domain, "dimension must be positive");
  require(R > 0.0, ErrorKind::Domain, "radius must be positive");
  require(grid.t0 >= 0.01 * std::pow(2.0, grid.halvings), ErrorKind::OutOfScope,
          "oracle times below 0.01 are not supported");
  HeatLimitReport report;
  report.n = n;
  report.R = R;
  report.heat_case = heat_case;
  const ModelManifold sphere = ModelManifold::sphere(n, R);
  double theta = 0.0;
  if (heat_case == HeatCase::Antipodal) {
    report.k = n - 1;
    report.distance = std::numbers::pi * R;
    report.predicted = antipodal_limit_via_Sxy(n, R);
    theta = std::numbers::pi;
  } else {
    require(distance >= 0.0 && distance < std::numbers::pi * R, ErrorKind::DegenerateRoute,
            "nondegenerate case needs d < pi R");
    report.k = 0;
    report.distance = distance;
    report.predicted = nondegenerate_limit_prediction(sphere, distance);
    theta = distance / R;
  }
  std::vector<double> ratios;
  for (int j = 0; j <= grid.halvings; ++j) {
    const double t = grid.t0 * std::pow(0.5, j);
    const double ratio = scaled_heat_ratio(n, R, theta, t, report.k);
    report.oracle_values.emplace_back(t, ratio);
    ratios.push_back(ratio);
  }
  const RichardsonTable table(ratios, 2.0, 1.0);
  report.richardson_rows = table.rows();
  const auto levels = std::min<std::size_t>(grid.richardson_levels, table.rows().size() - 1);
  report.extrapolated_oracle = table.value(levels);
  report.rel_deviation = std::abs(report.predicted - report.extrapolated_oracle) / std::abs(report.predicted);
  return report;
}

/// CSV columns: t, ratio.
inline void write_heat_series_csv(std::ostream& os, const HeatLimitReport& report) {
  const auto old_precision = os.precision(17);
  os << "t,ratio\n";
  for (const auto& [t, ratio] : report.oracle_values) os << t << ',' << ratio << '\n';
  os.precision(old_precision);
}

}  // namespace geodet
