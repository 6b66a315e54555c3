#pragma once

// Spectral data of the Dirichlet operator -d^2/ds^2 on an interval [a, b],
// acting on fields with n components.
//
// Eigenfunctions are indexed by a fiber slot i in 1..n and a frequency k >= 1.
// Two orthonormal bases are provided:
//   L2:  E_ik(s) = sqrt(2/(b-a)) sin(pi k (s-a)/(b-a)) e_i
//   H1:  F_ik(s) = E_ik(s) / sqrt(lambda_k),   lambda_k = pi^2 k^2 / (b-a)^2
// where H1 carries the inner product (X, Y) = int <X', Y'> ds.
//
// Flat storage is k-major: index (k-1)*n + (i-1). Truncating at frequency K
// keeps the first n*K entries, so truncations are nested.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "geodet/errors.hpp"

namespace geodet {

struct IntervalGrid {
  double a = 0.0;
  double b = 1.0;
  int quadrature_order = 32;

  double length() const { return b - a; }

  void validate() const {
    require(std::isfinite(a) && std::isfinite(b) && a < b, ErrorKind::Domain,
            "interval requires a < b");
    require(quadrature_order >= 2, ErrorKind::Domain, "quadrature order must be at least 2");
  }
};

struct ModeIndex {
  int i = 1;  // fiber slot, 1-based
  int k = 1;  // frequency, 1-based

  void validate(int n) const {
    require(i >= 1 && i <= n, ErrorKind::Domain, "fiber index out of range");
    require(k >= 1, ErrorKind::Domain, "frequency index must be at least 1");
  }
};

inline int flat_index(ModeIndex mode, int n) { return (mode.k - 1) * n + (mode.i - 1); }

inline ModeIndex mode_at(int flat, int n) { return {flat % n + 1, flat / n + 1}; }

/// lambda_k = pi^2 k^2 / (b - a)^2.
inline double dirichlet_eigenvalue(const IntervalGrid& grid, int k) {
  const double w = std::numbers::pi * k / grid.length();
  return w * w;
}

struct SpectralEigenvalue {
  double value;
  int multiplicity;
};

inline std::vector<SpectralEigenvalue> dirichlet_eigenvalues(const IntervalGrid& grid, int n, int K) {
  grid.validate();
  require(K >= 1, ErrorKind::EmptyRequest, "at least one eigenvalue must be requested");
  require(n >= 1, ErrorKind::Domain, "fiber dimension must be positive");
  std::vector<SpectralEigenvalue> out;
  out.reserve(K);
  for (int k = 1; k <= K; ++k) out.push_back({dirichlet_eigenvalue(grid, k), n});
  return out;
}

enum class Basis { L2, H1 };

/// Scalar profile of E_ik or F_ik (the value in slot i).
inline double basis_profile(int k, const IntervalGrid& grid, Basis which, double s) {
  const double len = grid.length();
  const double phase = std::numbers::pi * k * (s - grid.a) / len;
  const double amplitude = which == Basis::L2 ? std::sqrt(2.0 / len)
                                              : std::sqrt(2.0 * len) / (std::numbers::pi * k);
  return amplitude * std::sin(phase);
}

inline double basis_profile_derivative(int k, const IntervalGrid& grid, Basis which, double s) {
  const double len = grid.length();
  const double freq = std::numbers::pi * k / len;
  const double amplitude = which == Basis::L2 ? std::sqrt(2.0 / len)
                                              : std::sqrt(2.0 * len) / (std::numbers::pi * k);
  return amplitude * freq * std::cos(freq * (s - grid.a));
}

inline Eigen::VectorXd basis_function(ModeIndex mode, const IntervalGrid& grid, int n, Basis which,
                                      double s) {
  grid.validate();
  mode.validate(n);
  require(s >= grid.a && s <= grid.b, ErrorKind::Domain, "evaluation point outside the interval");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (s == grid.a || s == grid.b) return v;
  v(mode.i - 1) = basis_profile(mode.k, grid, which, s);
  return v;
}

/// int_a^b sin(pi k (s-a)/L) sin(pi l (s-a)/L) ds.
inline double sine_product_integral(int k, int l, const IntervalGrid& grid) {
  return k == l ? 0.5 * grid.length() : 0.0;
}

/// Coefficients of a field in the L2 eigenbasis E_ik, flat k-major.
class SpectralCoefficients {
 public:
  SpectralCoefficients(int n, IntervalGrid grid, std::vector<double> coefficients)
      : n_(n), grid_(grid), coefficients_(std::move(coefficients)) {
    grid_.validate();
    require(n_ >= 1, ErrorKind::Domain, "fiber dimension must be positive");
    require(coefficients_.size() % static_cast<std::size_t>(n_) == 0, ErrorKind::Domain,
            "coefficient count must be a multiple of the fiber dimension");
  }

  static SpectralCoefficients zero(int n, IntervalGrid grid, int K) {
    return {n, grid, std::vector<double>(static_cast<std::size_t>(n) * K, 0.0)};
  }

  int n() const { return n_; }
  int max_frequency() const { return static_cast<int>(coefficients_.size()) / n_; }
  const IntervalGrid& grid() const { return grid_; }
  std::span<const double> values() const { return coefficients_; }

  double& operator[](ModeIndex mode) { return coefficients_.at(flat_index(mode, n_)); }
  double operator[](ModeIndex mode) const { return coefficients_.at(flat_index(mode, n_)); }

 private:
  int n_;
  IntervalGrid grid_;
  std::vector<double> coefficients_;
};

/// (sum_ik lambda_k^m |x_ik|^2)^(1/2).
inline double sobolev_norm(const SpectralCoefficients& x, double m) {
  double sum = 0.0;
  const int n = x.n();
  const auto values = x.values();
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    const double c = values[flat];
    if (c == 0.0) continue;
    const int k = static_cast<int>(flat) / n + 1;
    sum += std::pow(dirichlet_eigenvalue(x.grid(), k), m) * c * c;
  }
  return std::sqrt(sum);
}

/// Constant in ||x||_{H^l} <= C ||x||_{H^m}, l <= m: ((b-a)/pi)^(m-l).
inline double sobolev_embedding_constant(const IntervalGrid& grid, double l, double m) {
  return std::pow(grid.length() / std::numbers::pi, m - l);
}

}  // namespace geodet
