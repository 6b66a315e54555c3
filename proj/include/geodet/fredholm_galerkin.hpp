#pragma once

// Fredholm determinants of the Hessian of the energy, id + P^{-1} R on H^1_0,
// through nested finite-dimensional truncations.
//
// Two filtrations are implemented:
//   Fourier(K):        span of F_ik, k <= K (eigenfunctions of P scaled to unit H^1 norm)
//   PiecewiseLinear:   hat-function fields W_tau vanishing at the endpoints
// Both produce the symmetric matrix of the bilinear form
//   (X, Y) -> int <X', Y'> + <R X, Y> ds
// in an H^1-orthonormal basis of the truncation space.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/trigamma.hpp>

#include "geodet/errors.hpp"
#include "geodet/extrapolation.hpp"
#include "geodet/interval_spectrum.hpp"
#include "geodet/model_geometry.hpp"
#include "geodet/quadrature.hpp"

namespace geodet {

inline constexpr double kDefaultKernelTolerance = 1e-8;

enum class Filtration { Fourier, PiecewiseLinear };

struct GalerkinMatrix {
  Matrix entries;
  Filtration filtration = Filtration::Fourier;
  int level = 0;  // K for Fourier, N for piecewise
  int n = 1;

  Eigen::Index dimension() const { return entries.rows(); }
};

class Partition {
 public:
  explicit Partition(std::vector<double> times) : times_(std::move(times)) {
    require(times_.size() >= 2, ErrorKind::Domain, "partition needs at least one interval");
    require(times_.front() == 0.0 && times_.back() == 1.0, ErrorKind::Domain,
            "partition must start at 0 and end at 1");
    for (std::size_t j = 1; j < times_.size(); ++j) {
      require(times_[j] > times_[j - 1], ErrorKind::Domain, "partition must be strictly increasing");
    }
  }

  static Partition uniform(int N) {
    require(N >= 1, ErrorKind::Domain, "partition needs at least one interval");
    std::vector<double> t(N + 1);
    for (int j = 0; j <= N; ++j) t[j] = static_cast<double>(j) / N;
    t.back() = 1.0;
    return Partition(std::move(t));
  }

  int intervals() const { return static_cast<int>(times_.size()) - 1; }
  const std::vector<double>& times() const { return times_; }
  double step(int j) const { return times_[j] - times_[j - 1]; }  // Delta_j, j = 1..N

  double mesh() const {
    double m = 0.0;
    for (int j = 1; j <= intervals(); ++j) m = std::max(m, step(j));
    return m;
  }

 private:
  std::vector<double> times_;
};

// ---------------------------------------------------------------------------
// symmetric linear algebra

/// Index sets of the independent diagonal blocks of a symmetric matrix.
inline std::vector<std::vector<Eigen::Index>> symmetric_blocks(const Matrix& m) {
  const Eigen::Index size = m.rows();
  std::vector<Eigen::Index> parent(size);
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index j = 0; j < size; ++j)
    for (Eigen::Index i = j + 1; i < size; ++i)
      if (m(i, j) != 0.0) parent[find(i)] = find(j);

  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> slot(size, -1);
  for (Eigen::Index i = 0; i < size; ++i) {
    const Eigen::Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[root]].push_back(i);
  }
  return blocks;
}

inline Matrix extract_block(const Matrix& m, const std::vector<Eigen::Index>& idx) {
  const auto b = static_cast<Eigen::Index>(idx.size());
  Matrix out(b, b);
  for (Eigen::Index i = 0; i < b; ++i)
    for (Eigen::Index j = 0; j < b; ++j) out(i, j) = m(idx[i], idx[j]);
  return out;
}

struct SymmetricDeterminant {
  double log_abs = 0.0;
  int sign = 1;
  double smallest_pivot = std::numeric_limits<double>::infinity();

  double value() const { return sign * std::exp(log_abs); }
};

/// Determinant through pivoted LDL^T on each independent block.
inline SymmetricDeterminant symmetric_determinant(const Matrix& m) {
  SymmetricDeterminant out;
  for (const auto& idx : symmetric_blocks(m)) {
    const Matrix block = extract_block(m, idx);
    const Eigen::LDLT<Matrix> ldlt(block);
    const Vector d = ldlt.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      out.smallest_pivot = std::min(out.smallest_pivot, std::abs(d(i)));
      if (d(i) == 0.0) {
        out.sign = 0;
        continue;
      }
      out.log_abs += std::log(std::abs(d(i)));
      if (d(i) < 0.0) out.sign = -out.sign;
    }
  }
  return out;
}

/// All eigenvalues with eigenvectors, assembled blockwise.
struct SymmetricSpectrum {
  Vector eigenvalues;
  Matrix eigenvectors;  // columns, in the full index space
};

inline SymmetricSpectrum symmetric_spectrum(const Matrix& m) {
  SymmetricSpectrum out;
  out.eigenvalues.resize(m.rows());
  out.eigenvectors = Matrix::Zero(m.rows(), m.cols());
  Eigen::Index col = 0;
  for (const auto& idx : symmetric_blocks(m)) {
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(extract_block(m, idx));
    for (Eigen::Index e = 0; e < solver.eigenvalues().size(); ++e, ++col) {
      out.eigenvalues(col) = solver.eigenvalues()(e);
      for (std::size_t r = 0; r < idx.size(); ++r)
        out.eigenvectors(idx[r], col) = solver.eigenvectors()(static_cast<Eigen::Index>(r), e);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fourier filtration

namespace detail {

inline QuadratureRule fourier_rule(const IntervalGrid& grid, int K, int nodes_per_halfwave,
                                   int order) {
  // products F_k F_l oscillate with up to 2K half-waves on the interval
  const int nodes = std::max(64, 2 * nodes_per_halfwave * 2 * K);
  const int panels = (nodes + order - 1) / order;
  return composite_gauss_legendre(grid.a, grid.b, panels, order);
}

}  // namespace detail

/// H^1 Gram representation of the Hessian on span{F_ik : k <= K}.
/// Entries are delta + (R F_ik, F_jl)_{L^2}; constant potentials use the
/// closed-form sine products.
inline GalerkinMatrix assemble_hessian_fourier(const JacobiSystem& sys, int K,
                                               int nodes_per_halfwave = 4, int gauss_order = 8) {
  require(K >= 1, ErrorKind::EmptyRequest, "at least one Fourier mode is required");
  const int n = sys.n();
  const IntervalGrid grid = sys.interval();
  const auto dim = static_cast<Eigen::Index>(n) * K;

  GalerkinMatrix out;
  out.filtration = Filtration::Fourier;
  out.level = K;
  out.n = n;
  out.entries = Matrix::Identity(dim, dim);

  if (sys.is_constant()) {
    const Matrix& v = *sys.constant_value();
    const double len = grid.length();
    for (int k = 1; k <= K; ++k) {
      // |F_k|^2 amplitude 2L/(pi^2 k^2) times int sin^2 = L/2
      const double weight = 2.0 * len / (std::numbers::pi * std::numbers::pi * k * k) *
                            sine_product_integral(k, k, grid);
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
          out.entries(flat_index({i, k}, n), flat_index({j, k}, n)) += weight * v(i - 1, j - 1);
    }
    return out;
  }

  const QuadratureRule rule = detail::fourier_rule(grid, K, nodes_per_halfwave, gauss_order);
  const auto q = static_cast<Eigen::Index>(rule.nodes.size());
  Matrix modes(q, K);
  std::vector<Matrix> potential(q);
  for (Eigen::Index p = 0; p < q; ++p) {
    const double s = rule.nodes[p];
    for (int k = 1; k <= K; ++k) modes(p, k - 1) = basis_profile(k, grid, Basis::H1, s);
    potential[p] = sys(s);
  }
  Vector weighted(q);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (Eigen::Index p = 0; p < q; ++p) weighted(p) = rule.weights[p] * potential[p](i, j);
      const Matrix block = modes.transpose() * (weighted.asDiagonal() * modes);
      for (int k = 0; k < K; ++k) {
        for (int l = 0; l < K; ++l) {
          const Eigen::Index row = static_cast<Eigen::Index>(k) * n + i;
          const Eigen::Index col = static_cast<Eigen::Index>(l) * n + j;
          out.entries(row, col) += block(k, l);
          if (i != j) out.entries(col, row) += block(k, l);
        }
      }
    }
  }
  return out;
}

/// sum_{k > K} 1/k^2.
inline double inverse_square_tail(int K) { return boost::math::trigamma(static_cast<double>(K) + 1.0); }

/// sum_{k > K} tr (P^{-1} R)_k, using the mean of tr R: each mode contributes
/// (L/(pi^2 k^2)) int_0^L tr R ds up to oscillatory terms.
inline double fourier_tail_trace(const JacobiSystem& sys, int K) {
  const double len = sys.length();
  double trace_integral = 0.0;
  if (sys.is_constant()) {
    trace_integral = sys.constant_value()->trace() * len;
  } else {
    const QuadratureRule rule = composite_gauss_legendre(0.0, len, 64, 8);
    trace_integral = rule.integrate([&](double s) { return sys(s).trace(); });
  }
  return len / (std::numbers::pi * std::numbers::pi) * trace_integral * inverse_square_tail(K);
}

struct DeterminantLevel {
  int size = 0;                 // K or N
  double value = 0.0;           // truncated determinant
  double tail_correction = 0.0; // added to log|det|
  double corrected = 0.0;       // value * exp(tail_correction)
  double extrapolated = 0.0;    // best estimate from levels up to this one
};

struct DeterminantEstimate {
  std::vector<DeterminantLevel> levels;
  double tail_correction = 0.0;
  double extrapolated = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

inline void check_schedule(std::span<const int> schedule) {
  require(!schedule.empty(), ErrorKind::EmptyRequest, "empty truncation schedule");
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    require(schedule[j] >= 1, ErrorKind::Domain, "truncation sizes must be positive");
    if (j > 0) require(schedule[j] > schedule[j - 1], ErrorKind::Domain, "schedule must increase");
  }
}

// Richardson in 1/size when the schedule is geometric; otherwise the finest
// corrected level stands.
inline void finish_estimate(DeterminantEstimate& est, double order) {
  auto& levels = est.levels;
  bool geometric = levels.size() >= 2;
  const double ratio = geometric ? static_cast<double>(levels[1].size) / levels[0].size : 1.0;
  for (std::size_t j = 1; j < levels.size(); ++j) {
    const double r = static_cast<double>(levels[j].size) / levels[j - 1].size;
    if (std::abs(r - ratio) > 1e-12) geometric = false;
  }
  std::vector<double> corrected;
  for (auto& level : levels) {
    corrected.push_back(level.corrected);
    if (geometric) {
      const RichardsonTable partial(corrected, ratio, order);
      level.extrapolated = partial.value(std::min<std::size_t>(corrected.size() - 1, 2));
    } else {
      level.extrapolated = level.corrected;
    }
  }
  est.tail_correction = levels.back().tail_correction;
  est.extrapolated = levels.back().extrapolated;
  const double last_change =
      levels.size() >= 2 ? std::abs(levels.back().corrected - levels[levels.size() - 2].corrected) : 0.0;
  est.error_estimate = std::max(last_change, std::abs(est.extrapolated - levels.back().corrected));
}

}  // namespace detail

/// Truncated determinants over the schedule with the analytic trace tail,
/// Richardson-extrapolated in K.
inline DeterminantEstimate fredholm_det(const JacobiSystem& sys, std::span<const int> schedule) {
  detail::check_schedule(schedule);
  DeterminantEstimate est;
  for (const int K : schedule) {
    const GalerkinMatrix m = assemble_hessian_fourier(sys, K);
    const SymmetricDeterminant det = symmetric_determinant(m.entries);
    if (det.sign == 0 || det.smallest_pivot < kDefaultKernelTolerance) {
      throw Error(ErrorKind::DegenerateOperator,
                  "truncated Hessian is singular at K = " + std::to_string(K) +
                      "; use fredholm_det_deflated");
    }
    DeterminantLevel level;
    level.size = K;
    level.value = det.value();
    level.tail_correction = fourier_tail_trace(sys, K);
    level.corrected = det.sign * std::exp(det.log_abs + level.tail_correction);
    est.levels.push_back(level);
  }
  detail::finish_estimate(est, sys.is_constant() ? 3.0 : 2.0);
  return est;
}

struct TraceReport {
  double spectral_sum = 0.0;   // sum_ik (R F_ik, F_ik) with analytic tail
  double ricci_integral = 0.0; // -int ric(g', g') s(1-s) ds
  double difference() const { return std::abs(spectral_sum - ricci_integral); }
};

inline constexpr double kTraceAgreement = 1e-8;

/// Tr(Hessian - id) along a constant-curvature geodesic, two ways.
inline TraceReport hessian_trace(const GeodesicData& g, int K = 512) {
  const JacobiSystem sys = jacobi_endomorphism(g);
  const GalerkinMatrix m = assemble_hessian_fourier(sys, K);
  TraceReport out;
  out.spectral_sum = m.entries.trace() - static_cast<double>(m.dimension()) + fourier_tail_trace(sys, K);
  // ric is constant along the geodesic and int_0^1 s(1-s) ds = 1/6
  out.ricci_integral = -ricci_along(g) / 6.0;
  if (out.difference() > kTraceAgreement * std::max(1.0, std::abs(out.ricci_integral))) {
    throw Error(ErrorKind::Integration, "spectral trace and Ricci integral disagree");
  }
  return out;
}

/// sum_{k <= K} cos(2 pi k s) / (pi^2 k^2), which tends to s^2 - s + 1/6 on [0, 1].
inline double bernoulli_cosine_series(double s, int K) {
  double sum = 0.0;
  for (int k = K; k >= 1; --k) {
    const double kk = static_cast<double>(k);
    sum += std::cos(2.0 * std::numbers::pi * kk * s) / (kk * kk);
  }
  return sum / (std::numbers::pi * std::numbers::pi);
}

// ---------------------------------------------------------------------------
// deflation

struct Deflation {
  Matrix kernel_basis;      // orthonormal columns spanning the numeric nullspace
  double complement_det = 0.0;
  int kernel_dimension = 0;
};

/// Splits off eigenvalues below kernel_tol. Eigenvalues inside
/// [kernel_tol / 10, 10 kernel_tol] make the split ambiguous.
inline Deflation deflate(const Matrix& m, double kernel_tol = kDefaultKernelTolerance) {
  require(kernel_tol > 0.0, ErrorKind::Domain, "kernel tolerance must be positive");
  const SymmetricSpectrum spec = symmetric_spectrum(m);
  Deflation out;
  std::vector<Eigen::Index> kernel;
  double log_abs = 0.0;
  int sign = 1;
  for (Eigen::Index e = 0; e < spec.eigenvalues.size(); ++e) {
    const double lambda = spec.eigenvalues(e);
    const double mag = std::abs(lambda);
    if (mag >= 0.1 * kernel_tol && mag <= 10.0 * kernel_tol) {
      throw Error(ErrorKind::IllSeparatedKernel,
                  "eigenvalue " + std::to_string(lambda) + " lies in the kernel-tolerance gap");
    }
    if (mag < kernel_tol) {
      kernel.push_back(e);
    } else {
      log_abs += std::log(mag);
      if (lambda < 0.0) sign = -sign;
    }
  }
  out.kernel_dimension = static_cast<int>(kernel.size());
  out.kernel_basis.resize(m.rows(), out.kernel_dimension);
  for (int c = 0; c < out.kernel_dimension; ++c) out.kernel_basis.col(c) = spec.eigenvectors.col(kernel[c]);
  out.complement_det = sign * std::exp(log_abs);
  return out;
}

/// det of m restricted to the orthogonal complement of span(kernel_basis).
inline double determinant_on_complement(const Matrix& m, const Matrix& kernel_basis) {
  const Eigen::Index k = kernel_basis.cols();
  if (k == 0) return symmetric_determinant(m).value();
  const Eigen::HouseholderQR<Matrix> qr(kernel_basis);
  const Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.rows());
  const Matrix complement = q.rightCols(m.rows() - k);
  return symmetric_determinant(complement.transpose() * m * complement).value();
}

struct DeflatedEstimate {
  DeterminantEstimate estimate;
  int kernel_dimension = 0;
};

/// Fredholm determinant on the orthogonal complement of the numeric kernel.
inline DeflatedEstimate fredholm_det_deflated(const JacobiSystem& sys,
                                              double kernel_tol,
                                              std::span<const int> schedule) {
  detail::check_schedule(schedule);
  DeflatedEstimate out;
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    const int K = schedule[j];
    const GalerkinMatrix m = assemble_hessian_fourier(sys, K);
    const Deflation d = deflate(m.entries, kernel_tol);
    if (j + 1 == schedule.size()) out.kernel_dimension = d.kernel_dimension;
    DeterminantLevel level;
    level.size = K;
    level.value = d.complement_det;
    level.tail_correction = fourier_tail_trace(sys, K);
    level.corrected = level.value * std::exp(level.tail_correction);
    out.estimate.levels.push_back(level);
  }
  detail::finish_estimate(out.estimate, sys.is_constant() ? 3.0 : 2.0);
  return out;
}

// ---------------------------------------------------------------------------
// piecewise-linear filtration W_tau

namespace detail {

// H^1 Gram matrix D_tau of the hat functions at interior nodes (one fiber).
inline Matrix hat_stiffness(const Partition& tau) {
  const int N = tau.intervals();
  Matrix d = Matrix::Zero(N - 1, N - 1);
  for (int j = 1; j <= N - 1; ++j) {
    d(j - 1, j - 1) = 1.0 / tau.step(j) + 1.0 / tau.step(j + 1);
    if (j < N - 1) d(j - 1, j) = d(j, j - 1) = -1.0 / tau.step(j + 1);
  }
  return d;
}

inline Matrix kron_identity(const Matrix& a, int n) {
  Matrix out = Matrix::Zero(a.rows() * n, a.cols() * n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0)
        for (int c = 0; c < n; ++c) out(i * n + c, j * n + c) = a(i, j);
  return out;
}

}  // namespace detail

/// Hessian on W_tau, orthonormalized against the H^1 Gram matrix D_tau.
/// Index order is node-major: (j - 1) n + (i - 1).
inline GalerkinMatrix assemble_hessian_piecewise(const JacobiSystem& sys, const Partition& tau,
                                                 int gauss_order = 6) {
  const int N = tau.intervals();
  require(N >= 2, ErrorKind::Domain, "piecewise filtration needs at least two intervals");
  const int n = sys.n();
  const double len = sys.length();

  // stiffness and potential-weighted mass, both in physical time s = len * u
  const Matrix stiffness = detail::hat_stiffness(tau) / len;
  Matrix form = detail::kron_identity(stiffness, n);

  const QuadratureRule base = gauss_legendre(gauss_order);
  for (int e = 1; e <= N; ++e) {
    const double s0 = len * tau.times()[e - 1];
    const double h = len * tau.step(e);
    const int left = e - 1;  // interior node indices 1..N-1
    const int right = e;
    for (std::size_t q = 0; q < base.nodes.size(); ++q) {
      const double x = 0.5 * (base.nodes[q] + 1.0);
      const double w = 0.5 * h * base.weights[q];
      const Matrix v = sys(s0 + x * h);
      const double phi[2] = {1.0 - x, x};
      const int node[2] = {left, right};
      for (int a = 0; a < 2; ++a) {
        if (node[a] < 1 || node[a] > N - 1) continue;
        for (int b = 0; b < 2; ++b) {
          if (node[b] < 1 || node[b] > N - 1) continue;
          form.block(static_cast<Eigen::Index>(node[a] - 1) * n, static_cast<Eigen::Index>(node[b] - 1) * n, n, n) +=
              (w * phi[a] * phi[b]) * v;
        }
      }
    }
  }

  const Eigen::LLT<Matrix> chol(detail::kron_identity(stiffness, n));
  const Matrix lower = chol.matrixL();
  Matrix g = lower.triangularView<Eigen::Lower>().solve(form);
  g = lower.triangularView<Eigen::Lower>().solve(g.transpose()).transpose();

  GalerkinMatrix out;
  out.filtration = Filtration::PiecewiseLinear;
  out.level = N;
  out.n = n;
  out.entries = 0.5 * (g + g.transpose());
  return out;
}

/// Determinants on W_tau for uniform partitions with the given interval counts,
/// Richardson-extrapolated in the mesh. The missing high-frequency part of the
/// trace makes the raw error O(|tau|), followed by O(|tau|^2).
inline DeterminantEstimate piecewise_det(const JacobiSystem& sys, std::span<const int> intervals) {
  detail::check_schedule(intervals);
  DeterminantEstimate est;
  for (const int N : intervals) {
    const GalerkinMatrix m = assemble_hessian_piecewise(sys, Partition::uniform(N));
    DeterminantLevel level;
    level.size = N;
    level.value = symmetric_determinant(m.entries).value();
    level.corrected = level.value;
    est.levels.push_back(level);
  }
  detail::finish_estimate(est, 1.0);
  return est;
}

// ---------------------------------------------------------------------------
// evaluation map and Phi_0 products

namespace detail {

// H^1 energy of the scalar solution of x'' = -c x on [0, h] with end values
// (a, b): a^2 A + 2ab B + b^2 A.
struct SegmentForm {
  double diagonal;
  double coupling;
};

inline SegmentForm jacobi_segment_form(double h, double c) {
  if (c == 0.0) return {1.0 / h, -1.0 / h};
  if (c > 0.0) {
    const double w = std::sqrt(c);
    const double s = std::sin(w * h) / w;
    const double squares = 0.5 * h + std::sin(2.0 * w * h) / (4.0 * w);
    const double cross = 0.5 * h * std::cos(w * h) + std::sin(w * h) / (2.0 * w);
    return {squares / (s * s), -cross / (s * s)};
  }
  const double w = std::sqrt(-c);
  const double s = std::sinh(w * h) / w;
  const double squares = 0.5 * h + std::sinh(2.0 * w * h) / (4.0 * w);
  const double cross = 0.5 * h * std::cosh(w * h) + std::sinh(w * h) / (2.0 * w);
  return {squares / (s * s), -cross / (s * s)};
}

inline Matrix piecewise_jacobi_gram(const Partition& tau, double c) {
  const int N = tau.intervals();
  Matrix g = Matrix::Zero(N - 1, N - 1);
  for (int e = 1; e <= N; ++e) {
    const SegmentForm f = jacobi_segment_form(tau.step(e), c);
    const int a = e - 1, b = e;  // node indices
    if (a >= 1) g(a - 1, a - 1) += f.diagonal;
    if (b <= N - 1) g(b - 1, b - 1) += f.diagonal;
    if (a >= 1 && b <= N - 1) {
      g(a - 1, b - 1) += f.coupling;
      g(b - 1, a - 1) += f.coupling;
    }
  }
  return g;
}

}  // namespace detail

/// |det d ev_tau| prod_j Delta_j^{-n/2} = (det D_tau / det G_tau)^{1/2}, with G_tau
/// the H^1 Gram matrix of the piecewise Jacobi fields interpolating the
/// standard basis at the interior nodes.
inline double evaluation_map_jacobian(const GeodesicData& g, const Partition& tau) {
  const ModelManifold& m = g.manifold;
  require(m.is_constant_curvature(), ErrorKind::Domain, "evaluation map needs constant curvature");
  const int N = tau.intervals();
  require(N >= 2, ErrorKind::Domain, "partition needs at least two intervals");
  const double c = m.kappa() * g.speed * g.speed;
  if (c > 0.0) {
    for (int j = 1; j <= N; ++j) {
      if (std::sqrt(c) * tau.step(j) >= std::numbers::pi) {
        throw Error(ErrorKind::DegenerateSegment, "segment endpoints are conjugate");
      }
    }
  }
  const Eigen::LLT<Matrix> flat(detail::piecewise_jacobi_gram(tau, 0.0));
  const Eigen::LLT<Matrix> curved(detail::piecewise_jacobi_gram(tau, c));
  require(flat.info() == Eigen::Success && curved.info() == Eigen::Success, ErrorKind::DegenerateSegment,
          "Gram matrix of piecewise Jacobi fields is not positive definite");
  const Vector lf = Matrix(flat.matrixL()).diagonal();
  const Vector lc = Matrix(curved.matrixL()).diagonal();
  // det = prod L_ii^2; the tangent direction is flat, the other n-1 curved
  double log_ratio = 0.0;
  for (Eigen::Index i = 0; i < lf.size(); ++i) log_ratio += std::log(lf(i)) - std::log(lc(i));
  return std::exp((m.dimension() - 1) * log_ratio);
}

/// prod_j J(gamma(tau_{j-1}), gamma(tau_j))^{-1/2} along a geodesic of length r.
inline double phi0_chain(const ModelManifold& m, double r, const Partition& tau) {
  require(m.is_constant_curvature(), ErrorKind::Domain, "Phi_0 chain needs constant curvature");
  double log_product = 0.0;
  for (int j = 1; j <= tau.intervals(); ++j) {
    const double d = r * tau.step(j);
    if (d >= m.conjugate_distance()) throw Error(ErrorKind::CutLocus, "segment reaches the cut locus");
    log_product += -0.5 * std::log(exp_jacobian_closed_form(m, d));
  }
  return std::exp(log_product);
}

/// CSV columns: level, value, tail_correction, extrapolated.
inline void write_series_csv(std::ostream& os, const DeterminantEstimate& est) {
  const auto old_precision = os.precision(17);
  os << "level,value,tail_correction,extrapolated\n";
  for (const auto& l : est.levels) {
    os << l.size << ',' << l.value << ',' << l.tail_correction << ',' << l.extrapolated << '\n';
  }
  os.precision(old_precision);
}

}  // namespace geodet
