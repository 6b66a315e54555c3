#pragma once

// Reference computations that share no code path with the library routes they check.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace oracle {

/// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-14,
                      int depth = 40) {
  const std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, d - 1) + rec(mid, hi, fmid, frm, fhi, right, d - 1);
      };
  // fixed initial panels keep symmetric integrands from stopping the recursion early
  constexpr int panels = 16;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
    const double flo = f(lo), fhi = f(hi), fm = f(0.5 * (lo + hi));
    total += rec(lo, hi, flo, fm, fhi, (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi), depth);
  }
  return total;
}

/// sum_{k > K} 1/k^2 by Euler-Maclaurin: 1/K - 1/(2K^2) + 1/(6K^3) - 1/(30K^5).
inline double inverse_square_tail(long K) {
  const double k = static_cast<double>(K);
  return 1.0 / k - 0.5 / (k * k) + 1.0 / (6.0 * k * k * k) - 1.0 / (30.0 * std::pow(k, 5));
}

/// Constant-curvature Fredholm determinant as an eigenvalue product,
/// prod_k (1 - kappa r^2 / (pi k)^2)^(n-1), truncated at K with the first-order tail.
inline double curvature_product(double kappa, double r, int n, long K) {
  const double c = kappa * r * r / (std::numbers::pi * std::numbers::pi);
  double log_abs = 0.0;
  int sign = 1;
  for (long k = K; k >= 1; --k) {
    const double f = 1.0 - c / (static_cast<double>(k) * k);
    if (f < 0) sign = -sign;
    log_abs += std::log(std::abs(f));
  }
  log_abs -= c * inverse_square_tail(K);
  return std::pow(sign * std::exp(log_abs), n - 1);
}

/// det J(1) for J'' = -kappa r^2 J, transverse directions only: (sin(c)/c)^(n-1), c = sqrt(kappa) r.
inline double curvature_jacobi_determinant(double kappa, double r, int n) {
  const double a = kappa * r * r;
  double s = 1.0;
  if (a > 0) s = std::sin(std::sqrt(a)) / std::sqrt(a);
  else if (a < 0) s = std::sinh(std::sqrt(-a)) / std::sqrt(-a);
  return std::pow(s, n - 1);
}

/// Heat kernel on the circle of radius 1 by Poisson summation of the line kernel.
inline double wrapped_gaussian(double theta, double t, int images = 50) {
  double sum = 0.0;
  for (int m = -images; m <= images; ++m) {
    const double x = theta + 2.0 * std::numbers::pi * m;
    sum += std::exp(-x * x / (4.0 * t));
  }
  return sum / std::sqrt(4.0 * std::numbers::pi * t);
}

/// Determinant of a dense matrix by full-pivot LU.
inline double dense_determinant(const Eigen::MatrixXd& m) { return Eigen::FullPivLU<Eigen::MatrixXd>(m).determinant(); }

/// Random symmetric matrix I + eps * S, S with standard normal entries.
inline Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int size, double eps) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd s(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = normal(rng);
  return Eigen::MatrixXd::Identity(size, size) + eps * s;
}

}  // namespace oracle
