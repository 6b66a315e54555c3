#pragma once

// Determinants of Jacobi operators P + V = -d^2/ds^2 + V(s) on [0, t] from the
// matrix initial value problem
//
//   J''(s) = V(s) J(s),   J(0) = 0,   J'(0) = I.
//
// For positive operators det_zeta(P + V2) / det_zeta(P + V1) = det J2(t) / det J1(t);
// the zeta determinant of the free operator is (2t)^n.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geodet/errors.hpp"
#include "geodet/model_geometry.hpp"

namespace geodet {

/// Relative size of det J(t) / t^n below which an operator counts as having a zero mode.
inline constexpr double kDegeneracyThreshold = 1e-6;

inline constexpr int kDefaultOdeSteps = 4096;

struct JacobiState {
  Matrix J;
  Matrix Jprime;
};

struct JacobiPropagation {
  std::vector<double> t_grid;
  std::vector<Matrix> J;
  std::vector<Matrix> Jprime;
  double step_size = 0.0;
  /// |J_h(t) - J_{2h}(t)| / 15, the step-halving estimate of the error in J(t).
  double error_estimate = 0.0;

  const Matrix& final_J() const { return J.back(); }
  const Matrix& final_Jprime() const { return Jprime.back(); }
  double length() const { return t_grid.back(); }

  /// J'(s)^T J(s) - J(s)^T J'(s), identically zero for symmetric potentials.
  Matrix wronskian(std::size_t index) const {
    return Jprime[index].transpose() * J[index] - J[index].transpose() * Jprime[index];
  }

  double max_wronskian_drift() const {
    double drift = 0.0;
    for (std::size_t q = 0; q < J.size(); ++q) drift = std::max(drift, wronskian(q).norm());
    return drift;
  }

  /// int_0^t J(s)^T J(s) ds by composite Simpson on the stored grid.
  Matrix gram_integral() const {
    const std::size_t intervals = J.size() - 1;
    require(intervals % 2 == 0, ErrorKind::Integration, "Simpson rule needs an even step count");
    const auto n = J.front().cols();
    Matrix sum = Matrix::Zero(n, n);
    for (std::size_t q = 0; q <= intervals; ++q) {
      const double w = (q == 0 || q == intervals) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
      sum += w * (J[q].transpose() * J[q]);
    }
    return sum * (step_size / 3.0);
  }
};

namespace detail {

template <typename Visitor>
JacobiState rk4_propagate(const JacobiSystem& sys, double s0, double s1, int steps, JacobiState st,
                          Visitor&& visit) {
  const double h = (s1 - s0) / steps;
  visit(s0, st);
  for (int i = 0; i < steps; ++i) {
    const double s = s0 + i * h;
    const Matrix v0 = sys(s);
    const Matrix vm = sys(s + 0.5 * h);
    const Matrix v1 = sys(s + h);
    if (!v0.allFinite() || !vm.allFinite() || !v1.allFinite()) {
      throw Error(ErrorKind::Integration, "potential is not finite at s = " + std::to_string(s));
    }
    const Matrix k1J = st.Jprime;
    const Matrix k1P = v0 * st.J;
    const Matrix k2J = st.Jprime + 0.5 * h * k1P;
    const Matrix k2P = vm * (st.J + 0.5 * h * k1J);
    const Matrix k3J = st.Jprime + 0.5 * h * k2P;
    const Matrix k3P = vm * (st.J + 0.5 * h * k2J);
    const Matrix k4J = st.Jprime + h * k3P;
    const Matrix k4P = v1 * (st.J + h * k3J);
    st.J += (h / 6.0) * (k1J + 2.0 * k2J + 2.0 * k3J + k4J);
    st.Jprime += (h / 6.0) * (k1P + 2.0 * k2P + 2.0 * k3P + k4P);
    visit(s0 + (i + 1) * h, st);
  }
  return st;
}

inline JacobiState propagate_final(const JacobiSystem& sys, double s0, double s1, int steps,
                                   JacobiState st) {
  return rk4_propagate(sys, s0, s1, steps, std::move(st), [](double, const JacobiState&) {});
}

}  // namespace detail

/// Fixed-step RK4 integration of the Jacobi equation from J(0) = 0, J'(0) = I.
inline JacobiPropagation solve_jacobi_ode(const JacobiSystem& sys, int steps = kDefaultOdeSteps) {
  require(steps >= 16, ErrorKind::Domain, "at least 16 integration steps are required");
  const int n = sys.n();
  const double t = sys.length();
  const JacobiState start{Matrix::Zero(n, n), Matrix::Identity(n, n)};

  JacobiPropagation prop;
  prop.step_size = t / steps;
  prop.t_grid.reserve(steps + 1);
  prop.J.reserve(steps + 1);
  prop.Jprime.reserve(steps + 1);
  detail::rk4_propagate(sys, 0.0, t, steps, start, [&](double s, const JacobiState& st) {
    prop.t_grid.push_back(s);
    prop.J.push_back(st.J);
    prop.Jprime.push_back(st.Jprime);
  });
  prop.t_grid.back() = t;

  const JacobiState coarse = detail::propagate_final(sys, 0.0, t, steps / 2, start);
  prop.error_estimate = (prop.final_J() - coarse.J).norm() / 15.0;
  return prop;
}

/// The 2n x 2n map (J(s0), J'(s0)) -> (J(s1), J'(s1)).
inline Matrix transfer_matrix(const JacobiSystem& sys, double s0, double s1, int steps) {
  const int n = sys.n();
  Matrix out(2 * n, 2 * n);
  const JacobiState from_value =
      detail::propagate_final(sys, s0, s1, steps, {Matrix::Identity(n, n), Matrix::Zero(n, n)});
  const JacobiState from_slope =
      detail::propagate_final(sys, s0, s1, steps, {Matrix::Zero(n, n), Matrix::Identity(n, n)});
  out.topLeftCorner(n, n) = from_value.J;
  out.bottomLeftCorner(n, n) = from_value.Jprime;
  out.topRightCorner(n, n) = from_slope.J;
  out.bottomRightCorner(n, n) = from_slope.Jprime;
  return out;
}

/// Smallest det J(s) / s^n over the grid, s > 0. Positive operators keep this away from zero.
inline double min_scaled_determinant(const JacobiPropagation& prop) {
  const auto n = prop.J.front().cols();
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t q = 1; q < prop.J.size(); ++q) {
    lowest = std::min(lowest, prop.J[q].determinant() / std::pow(prop.t_grid[q], double(n)));
  }
  return lowest;
}

inline bool is_degenerate(const JacobiPropagation& prop) {
  const auto n = prop.J.front().cols();
  return std::abs(prop.final_J().determinant()) < kDegeneracyThreshold * std::pow(prop.length(), double(n));
}

namespace detail {
inline JacobiPropagation positive_propagation(const JacobiSystem& sys, int steps, const char* which) {
  JacobiPropagation prop = solve_jacobi_ode(sys, steps);
  if (min_scaled_determinant(prop) <= kDegeneracyThreshold) {
    throw Error(ErrorKind::NonpositiveOperator,
                std::string(which) + " operator is not positive (det J vanishes on (0, t])");
  }
  return prop;
}
}  // namespace detail

/// det J2(t) / det J1(t) = det_zeta(P + V2) / det_zeta(P + V1) for positive operators.
inline double gy_ratio(const JacobiSystem& sys1, const JacobiSystem& sys2, int steps = kDefaultOdeSteps) {
  require(sys1.n() == sys2.n(), ErrorKind::Domain, "fiber dimensions differ");
  require(std::abs(sys1.length() - sys2.length()) <= 1e-14 * sys1.length(), ErrorKind::Domain,
          "interval lengths differ");
  const JacobiPropagation p1 = detail::positive_propagation(sys1, steps, "first");
  const JacobiPropagation p2 = detail::positive_propagation(sys2, steps, "second");
  return p2.final_J().determinant() / p1.final_J().determinant();
}

struct DegenerateRatio {
  double value = 0.0;
  int zero_modes = 0;
};

/// det'_zeta(P + V_deg) / det_zeta(P + V_ref) for an operator with zero modes.
///
/// With U an orthonormal basis of ker J(t), Q0 of coker J(t), and the
/// complementary bases U1, Q1, the ratio is
///
///   det(U^T [int J^T J] U) |det(Q1^T J(t) U1)| / (det J_ref(t) |det(Q0^T J'(t) U)|).
///
/// When the kernel is everything this is det(int J^T J) / (det J_ref(t) |det J'(t)|).
inline DegenerateRatio gy_degenerate_ratio(const JacobiSystem& sys_deg, const JacobiSystem& sys_ref,
                                           int steps = kDefaultOdeSteps) {
  require(sys_deg.n() == sys_ref.n(), ErrorKind::Domain, "fiber dimensions differ");
  require(std::abs(sys_deg.length() - sys_ref.length()) <= 1e-14 * sys_deg.length(),
          ErrorKind::Domain, "interval lengths differ");
  if (steps % 2 != 0) ++steps;
  const JacobiPropagation deg = solve_jacobi_ode(sys_deg, steps);
  if (!is_degenerate(deg)) {
    throw Error(ErrorKind::WrongRoute, "operator has no zero mode; use the nondegenerate ratio");
  }
  const JacobiPropagation ref = detail::positive_propagation(sys_ref, steps, "reference");

  const double t = sys_deg.length();
  const Eigen::JacobiSVD<Matrix> svd(deg.final_J(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const auto n = sigma.size();
  Eigen::Index rank = 0;
  double range_factor = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sigma(i) >= kDegeneracyThreshold * t) {
      ++rank;
      range_factor *= sigma(i);
    }
  }
  const Eigen::Index kernel = n - rank;
  const Matrix U = svd.matrixV().rightCols(kernel);
  const Matrix Q0 = svd.matrixU().rightCols(kernel);

  const Matrix gram = U.transpose() * deg.gram_integral() * U;
  const Matrix slope = Q0.transpose() * deg.final_Jprime() * U;
  const double slope_det = std::abs(slope.determinant());
  require(slope_det > 0.0, ErrorKind::Integration, "J'(t) is singular on the kernel of J(t)");

  DegenerateRatio out;
  out.zero_modes = static_cast<int>(kernel);
  out.value = gram.determinant() * range_factor / (ref.final_J().determinant() * slope_det);
  return out;
}

enum class ZetaRoute { ClosedForm, GyRatio, Deflated };

inline const char* route_name(ZetaRoute route) {
  switch (route) {
    case ZetaRoute::ClosedForm: return "closed_form";
    case ZetaRoute::GyRatio: return "gy_ratio";
    case ZetaRoute::Deflated: return "deflated";
  }
  return "unknown";
}

struct ZetaDetValue {
  double value = 0.0;
  ZetaRoute route = ZetaRoute::ClosedForm;
  int excluded_zero_modes = 0;
};

/// det_zeta(-d^2/ds^2) on [0, t] with Dirichlet conditions and n components: (2t)^n.
inline ZetaDetValue zeta_det_dirichlet_laplacian(double t, int n) {
  require(std::isfinite(t) && t > 0.0, ErrorKind::Domain, "interval length must be positive");
  require(n >= 1, ErrorKind::Domain, "fiber dimension must be positive");
  return {std::pow(2.0 * t, n), ZetaRoute::ClosedForm, 0};
}

/// det_zeta(P^m) from zeta_{P^m}(z) = (t/pi)^{2mz} zeta_R(2mz), using
/// zeta_R(0) = -1/2 and zeta_R'(0) = -log(2 pi)/2.
inline double zeta_det_dirichlet_laplacian_power(double t, int n, double m) {
  require(std::isfinite(t) && t > 0.0, ErrorKind::Domain, "interval length must be positive");
  require(m > 0.0, ErrorKind::Domain, "power must be positive");
  constexpr double zeta0 = -0.5;
  const double zeta_prime0 = -0.5 * std::log(2.0 * std::numbers::pi);
  const double dzeta = 2.0 * m * std::log(t / std::numbers::pi) * zeta0 + 2.0 * m * zeta_prime0;
  return std::exp(-n * dzeta);
}

/// det_zeta(P + V) = det_zeta(P) det J(t) / t^n; det'_zeta with zero modes removed
/// when the operator is degenerate.
inline ZetaDetValue zeta_det_jacobi(const JacobiSystem& sys, int steps = kDefaultOdeSteps) {
  const int n = sys.n();
  const double t = sys.length();
  const double free_det = zeta_det_dirichlet_laplacian(t, n).value;
  const JacobiPropagation prop = solve_jacobi_ode(sys, steps);
  if (is_degenerate(prop)) {
    const DegenerateRatio ratio = gy_degenerate_ratio(sys, JacobiSystem::zero(n, t), steps);
    return {free_det * ratio.value, ZetaRoute::Deflated, ratio.zero_modes};
  }
  if (min_scaled_determinant(prop) <= kDegeneracyThreshold) {
    throw Error(ErrorKind::NonpositiveOperator, "operator is not positive");
  }
  return {free_det * prop.final_J().determinant() / std::pow(t, n), ZetaRoute::GyRatio, 0};
}

/// CSV columns: s, J_ij (row-major), Jp_ij (row-major).
inline void write_propagation_csv(std::ostream& os, const JacobiPropagation& prop) {
  const auto n = prop.J.front().rows();
  os << "s";
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) os << ",J_" << i + 1 << j + 1;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) os << ",Jp_" << i + 1 << j + 1;
  os << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t q = 0; q < prop.J.size(); ++q) {
    os << prop.t_grid[q];
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) os << ',' << prop.J[q](i, j);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) os << ',' << prop.Jprime[q](i, j);
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace geodet
