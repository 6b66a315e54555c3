#pragma once

// Model manifolds and the Jacobi data along their geodesics.
//
// Geodesics are parametrized on [0, 1] with constant speed r = d(x, y). In a
// parallel orthonormal frame with e_1 = gamma'/r, the Jacobi endomorphism
// R_gamma(s) = R(gamma', .)gamma' of a space of constant curvature kappa is
// the constant matrix -kappa r^2 (I - e_1 e_1^T). With this sign the Jacobi
// operator -d^2/ds^2 + R_gamma has eigenvalues pi^2 k^2 - kappa r^2 on the
// orthogonal directions and pi^2 k^2 on the tangent direction.

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "geodet/errors.hpp"
#include "geodet/interval_spectrum.hpp"

namespace geodet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixField = std::function<Matrix(double)>;

/// The operator -d^2/ds^2 + V(s) on [0, t] with Dirichlet conditions, V symmetric.
class JacobiSystem {
 public:
  static JacobiSystem constant(Matrix value, double t = 1.0) {
    JacobiSystem sys(static_cast<int>(value.rows()), t);
    require(value.rows() == value.cols(), ErrorKind::Domain, "potential must be square");
    require(value.allFinite(), ErrorKind::Domain, "potential must be finite");
    require((value - value.transpose()).norm() < 1e-12, ErrorKind::Domain,
            "potential must be symmetric");
    sys.constant_ = value;
    sys.field_ = [value](double) { return value; };
    return sys;
  }

  static JacobiSystem from_function(int n, double t, MatrixField field) {
    JacobiSystem sys(n, t);
    require(static_cast<bool>(field), ErrorKind::Domain, "potential function is empty");
    for (int q = 0; q <= 8; ++q) {
      const Matrix v = field(t * q / 8.0);
      require(v.rows() == n && v.cols() == n, ErrorKind::Domain, "potential has the wrong shape");
      require((v - v.transpose()).norm() < 1e-12, ErrorKind::Domain,
              "potential must be symmetric");
    }
    sys.field_ = std::move(field);
    return sys;
  }

  static JacobiSystem zero(int n, double t = 1.0) { return constant(Matrix::Zero(n, n), t); }

  int n() const { return n_; }
  double length() const { return t_; }
  IntervalGrid interval() const { return {0.0, t_}; }
  bool is_constant() const { return constant_.has_value(); }
  const std::optional<Matrix>& constant_value() const { return constant_; }

  Matrix operator()(double s) const { return constant_ ? *constant_ : field_(s); }

  /// Same operator with s -> t - s.
  JacobiSystem time_reversed() const {
    if (constant_) return *this;
    auto f = field_;
    const double t = t_;
    return from_function(n_, t_, [f, t](double s) { return f(t - s); });
  }

 private:
  JacobiSystem(int n, double t) : n_(n), t_(t) {
    require(n >= 1, ErrorKind::Domain, "fiber dimension must be positive");
    require(std::isfinite(t) && t > 0.0, ErrorKind::Domain, "interval length must be positive");
  }

  int n_;
  double t_;
  std::optional<Matrix> constant_;
  MatrixField field_;
};

struct ConstantCurvature {
  int n = 2;
  double kappa = 0.0;
};

/// Metric g_ss = 1 + V_ij(s) x^i x^j near the curve (s, 0, ..., 0), s in [0, t].
struct SyntheticPotential {
  int n = 1;
  double t = 1.0;
  MatrixField V;
};

class ModelManifold {
 public:
  static ModelManifold constant_curvature(int n, double kappa) {
    require(n >= 1, ErrorKind::Domain, "dimension must be positive");
    require(std::isfinite(kappa), ErrorKind::Domain, "curvature must be finite");
    return ModelManifold(ConstantCurvature{n, kappa});
  }

  static ModelManifold sphere(int n, double radius) {
    require(radius > 0.0, ErrorKind::Domain, "radius must be positive");
    return constant_curvature(n, 1.0 / (radius * radius));
  }

  static ModelManifold synthetic(int n, double t, MatrixField V) {
    // validates symmetry and shape
    (void)JacobiSystem::from_function(n, t, V);
    return ModelManifold(SyntheticPotential{n, t, std::move(V)});
  }

  int dimension() const {
    return std::visit([](const auto& m) { return m.n; }, data_);
  }
  bool is_constant_curvature() const { return std::holds_alternative<ConstantCurvature>(data_); }
  const ConstantCurvature& constant_curvature_data() const {
    require(is_constant_curvature(), ErrorKind::Domain, "manifold is not of constant curvature");
    return std::get<ConstantCurvature>(data_);
  }
  const SyntheticPotential& synthetic_data() const {
    require(!is_constant_curvature(), ErrorKind::Domain, "manifold is not synthetic");
    return std::get<SyntheticPotential>(data_);
  }
  double kappa() const { return constant_curvature_data().kappa; }

  /// Distance to the first conjugate point along a unit-speed geodesic (infinite if kappa <= 0).
  double conjugate_distance() const {
    const double k = kappa();
    return k > 0.0 ? std::numbers::pi / std::sqrt(k) : std::numeric_limits<double>::infinity();
  }

 private:
  explicit ModelManifold(std::variant<ConstantCurvature, SyntheticPotential> data)
      : data_(std::move(data)) {}

  std::variant<ConstantCurvature, SyntheticPotential> data_;
};

struct GeodesicData {
  ModelManifold manifold;
  double speed = 0.0;  // r = d(x, y) on the unit parametrization
  IntervalGrid parametrization{0.0, 1.0};

  double action() const { return 0.5 * speed * speed; }
};

/// R_gamma in a parallel frame with e_1 along the velocity.
inline JacobiSystem jacobi_endomorphism(const GeodesicData& g) {
  require(std::isfinite(g.speed) && g.speed >= 0.0, ErrorKind::Domain,
          "geodesic speed must be non-negative");
  const ModelManifold& m = g.manifold;
  if (!m.is_constant_curvature()) {
    const SyntheticPotential& syn = m.synthetic_data();
    return JacobiSystem::from_function(syn.n, syn.t, syn.V);
  }
  const int n = m.dimension();
  Matrix r = Matrix::Zero(n, n);
  const double shift = -m.kappa() * g.speed * g.speed;
  for (int i = 1; i < n; ++i) r(i, i) = shift;
  return JacobiSystem::constant(r, g.parametrization.length());
}

/// sin(x)/x, continued by 1 at the origin.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

/// sinh(x)/x, continued by 1 at the origin.
inline double sinhc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

/// J(x, y) = (sin(sqrt(kappa) d) / (sqrt(kappa) d))^(n-1); sinh for kappa < 0.
inline double exp_jacobian_closed_form(const ModelManifold& m, double d) {
  require(m.is_constant_curvature(), ErrorKind::Domain, "closed form needs constant curvature");
  require(std::isfinite(d) && d >= 0.0, ErrorKind::Domain, "distance must be non-negative");
  const double kappa = m.kappa();
  const int n = m.dimension();
  double factor = 1.0;
  if (kappa > 0.0) {
    require(d < m.conjugate_distance(), ErrorKind::ConjugatePoint,
            "distance reaches the first conjugate point");
    factor = sinc(std::sqrt(kappa) * d);
  } else if (kappa < 0.0) {
    factor = sinhc(std::sqrt(-kappa) * d);
  }
  return std::pow(factor, n - 1);
}

/// ric(gamma', gamma') = (n - 1) kappa r^2.
inline double ricci_along(const GeodesicData& g) {
  const ModelManifold& m = g.manifold;
  return (m.dimension() - 1) * m.kappa() * g.speed * g.speed;
}

struct TransportCheck {
  Vector point;            // integrated endpoint
  Vector closed_form;      // great-circle endpoint
  Matrix frame;            // transported tangent frame, columns in the ambient space
  double point_error = 0;  // |point - closed_form|
  double step_error = 0;   // |point(h) - point(h/2)|
  double orthonormality_defect = 0;
};

namespace detail {

// Ambient ODE on the sphere |x| = R: x'' = -(|x'|^2/R^2) x and, for each
// frame vector e, e' = -(<e, x'>/R^2) x (Levi-Civita transport).
struct SphereState {
  Vector x, v;
  Matrix frame;
};

inline SphereState sphere_rhs(const SphereState& st, double radius2) {
  SphereState d;
  d.x = st.v;
  d.v = -(st.v.squaredNorm() / radius2) * st.x;
  d.frame = -(st.x * (st.v.transpose() * st.frame)) / radius2;
  return d;
}

inline SphereState axpy(const SphereState& a, double h, const SphereState& b) {
  return {a.x + h * b.x, a.v + h * b.v, a.frame + h * b.frame};
}

inline SphereState integrate_sphere(SphereState st, double s, int steps, double radius2) {
  const double h = s / steps;
  for (int i = 0; i < steps; ++i) {
    const SphereState k1 = sphere_rhs(st, radius2);
    const SphereState k2 = sphere_rhs(axpy(st, 0.5 * h, k1), radius2);
    const SphereState k3 = sphere_rhs(axpy(st, 0.5 * h, k2), radius2);
    const SphereState k4 = sphere_rhs(axpy(st, h, k3), radius2);
    st.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    st.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    st.frame += h / 6.0 * (k1.frame + 2.0 * k2.frame + 2.0 * k3.frame + k4.frame);
  }
  return st;
}

}  // namespace detail

/// Integrates the geodesic with initial point x and velocity v on the sphere of
/// radius |x|, transporting an orthonormal tangent frame, and compares the
/// endpoint at time s with the great-circle formula.
inline TransportCheck sphere_parallel_transport_check(const Vector& x, const Vector& v, double s,
                                                      int steps = 2000) {
  require(x.size() >= 2 && x.size() == v.size(), ErrorKind::Domain, "point and velocity sizes differ");
  const double radius = x.norm();
  require(radius > 0.0, ErrorKind::Domain, "point must lie on a sphere of positive radius");
  require(std::abs(x.dot(v)) <= 1e-12 * radius * std::max(1.0, v.norm()), ErrorKind::Domain,
          "velocity is not tangent to the sphere");
  const auto dim = x.size();

  // tangent frame: Gram-Schmidt of the ambient basis against x
  Matrix frame(dim, dim - 1);
  int filled = 0;
  for (Eigen::Index c = 0; c < dim && filled < dim - 1; ++c) {
    Vector e = Vector::Unit(dim, c);
    e -= e.dot(x) / (radius * radius) * x;
    for (int j = 0; j < filled; ++j) e -= e.dot(frame.col(j)) * frame.col(j);
    if (e.norm() < 1e-8) continue;
    frame.col(filled++) = e.normalized();
  }

  const double r2 = radius * radius;
  const detail::SphereState start{x, v, frame};
  const detail::SphereState fine = detail::integrate_sphere(start, s, steps, r2);
  const detail::SphereState coarse = detail::integrate_sphere(start, s, steps / 2, r2);

  TransportCheck out;
  out.point = fine.x;
  const double speed = v.norm();
  if (speed == 0.0) {
    out.closed_form = x;
  } else {
    const double angle = speed * s / radius;
    out.closed_form = std::cos(angle) * x + std::sin(angle) * (radius / speed) * v;
  }
  out.frame = fine.frame;
  out.point_error = (out.point - out.closed_form).norm();
  out.step_error = (fine.x - coarse.x).norm();
  out.orthonormality_defect =
      (fine.frame.transpose() * fine.frame - Matrix::Identity(dim - 1, dim - 1)).norm();
  return out;
}

}  // namespace geodet
