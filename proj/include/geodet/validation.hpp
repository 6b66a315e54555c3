#pragma once

// End-to-end validation suite. Each criterion produces named records; the
// `validate` command and the acceptance test binary both run these.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "geodet/extrapolation.hpp"
#include "geodet/fredholm_galerkin.hpp"
#include "geodet/gelfand_yaglom.hpp"
#include "geodet/heat_asymptotics.hpp"
#include "geodet/model_geometry.hpp"

namespace geodet {

enum class Comparison { Equal, AtLeast, AtMost };

struct ValidationRecord {
  std::string check_name;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::Equal;
  bool passed = false;
  double runtime_ms = 0.0;
  bool timing = false;  // computed is a wall-clock duration in ms
};

/// Equal: |expected - computed| <= tolerance * max(1, |expected|).
inline bool evaluate(const ValidationRecord& r) {
  if (!std::isfinite(r.computed)) return false;
  switch (r.comparison) {
    case Comparison::Equal:
      return std::abs(r.expected - r.computed) <= r.tolerance * std::max(1.0, std::abs(r.expected));
    case Comparison::AtLeast: return r.computed >= r.expected;
    case Comparison::AtMost: return r.computed <= r.expected;
  }
  return false;
}

inline const char* comparison_name(Comparison c) {
  switch (c) {
    case Comparison::Equal: return "equal";
    case Comparison::AtLeast: return "at_least";
    case Comparison::AtMost: return "at_most";
  }
  return "unknown";
}

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<ValidationRecord> records;
  double runtime_ms = 0.0;

  bool passed() const {
    return !records.empty() &&
           std::all_of(records.begin(), records.end(), [](const auto& r) { return r.passed; });
  }
};

inline constexpr int kCriterionCount = 12;

namespace validation {

class Recorder {
 public:
  explicit Recorder(std::vector<ValidationRecord>& out) : out_(out) {}

  /// Records an equality check whose tolerance is absolute.
  void absolute(std::string name, double expected, double computed, double tol, double ms = 0.0) {
    push({std::move(name), expected, computed, tol / std::max(1.0, std::abs(expected)),
          Comparison::Equal, false, ms});
  }
  /// Records an equality check with the record's native scaled tolerance.
  void scaled(std::string name, double expected, double computed, double tol, double ms = 0.0) {
    push({std::move(name), expected, computed, tol, Comparison::Equal, false, ms});
  }
  void at_least(std::string name, double bound, double computed, double ms = 0.0) {
    push({std::move(name), bound, computed, 0.0, Comparison::AtLeast, false, ms});
  }
  void at_most(std::string name, double bound, double computed, double ms = 0.0) {
    push({std::move(name), bound, computed, 0.0, Comparison::AtMost, false, ms});
  }
  void runtime_below(std::string name, double bound_ms, double ms) {
    push({std::move(name), bound_ms, ms, 0.0, Comparison::AtMost, false, ms, true});
  }
  /// A check that threw: recorded as failed with the error name in the check name.
  void failure(std::string name, const std::string& error) {
    push({std::move(name) + " [" + error + "]", 0.0, std::nan(""), 0.0, Comparison::Equal, false, 0.0});
  }

 private:
  void push(ValidationRecord r) {
    r.passed = evaluate(r);
    out_.push_back(std::move(r));
  }
  std::vector<ValidationRecord>& out_;
};

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string format_number(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

inline std::string instance_tag(double kappa, double r, int n) {
  return "kappa" + format_number("%g", kappa) + "-r" + format_number("%.1f", r) + "-n" + std::to_string(n);
}

inline constexpr std::array<int, 4> kModeSchedule{64, 128, 256, 512};
inline constexpr std::array<double, 4> kGridKappa{-1.0, -0.3, 0.3, 1.0};
inline constexpr std::array<double, 3> kGridSpeed{0.1, 0.5, 1.0};
inline constexpr std::array<int, 2> kGridDimension{2, 3};

inline JacobiSystem constant_curvature_system(double kappa, double r, int n) {
  return jacobi_endomorphism({ModelManifold::constant_curvature(n, kappa), r});
}

inline double fourier_determinant(double kappa, double r, int n) {
  return fredholm_det(constant_curvature_system(kappa, r, n), kModeSchedule).extrapolated;
}

/// prod_{k=2}^{K} (1 - 1/k^2) by a log sum, times exp(-sum_{k>K} 1/k^2), divided
/// by the first free eigenvalue pi^2: det'(-d^2 - pi^2) / det(-d^2) on [0, 1].
inline double degenerate_product_oracle(int K) {
  double log_sum = 0.0;
  for (int k = K; k >= 2; --k) {
    const double kk = static_cast<double>(k);
    log_sum += std::log1p(-1.0 / (kk * kk));
  }
  log_sum -= inverse_square_tail(K);
  return std::exp(log_sum) / (std::numbers::pi * std::numbers::pi);
}

/// |p_{t+s}(theta) - (p_t * p_s)(theta)| on the unit circle at theta = 2 pi node / nodes, the convolution by the
/// trapezoid rule. Far from the source p_t is below double resolution, so the
/// kernels are summed in extended precision.
inline double circle_chapman_kolmogorov_defect(double t, double s, int theta_node, int nodes) {
  const SphereSpectrum<OracleReal> spec(1, OracleReal(1), 96);
  const OracleReal two_pi = 2 * boost::math::constants::pi<OracleReal>();
  auto weights = [&](double time) {
    std::vector<OracleReal> w;
    for (const auto& lambda : spec.eigenvalues()) w.push_back(exp(-lambda * OracleReal(time)));
    return w;
  };
  const std::vector<OracleReal> wt = weights(t), ws = weights(s), wts = weights(t + s);
  auto kernel = [](const std::vector<OracleReal>& w, const std::vector<OracleReal>& z) {
    OracleReal sum = 0;
    for (std::size_t l = 0; l < z.size(); ++l) sum += w[l] * z[l];
    return sum;
  };
  std::vector<OracleReal> pt(nodes), ps(nodes);
  for (int q = 0; q < nodes; ++q) {
    const std::vector<OracleReal> z = spec.zonal_values(two_pi * q / nodes);
    pt[q] = kernel(wt, z);
    ps[q] = kernel(ws, z);
  }
  OracleReal conv = 0;
  for (int q = 0; q < nodes; ++q) conv += pt[((theta_node - q) % nodes + nodes) % nodes] * ps[q];
  conv *= two_pi / nodes;
  const OracleReal direct = kernel(wts, spec.zonal_values(two_pi * theta_node / nodes));
  return static_cast<double>(abs(conv - direct));
}

// ---------------------------------------------------------------------------

inline void criterion_1(Recorder& rec) {
  const Stopwatch clock;
  const double value = fourier_determinant(1.0, std::numbers::pi / 2, 3);
  const double ms = clock.elapsed_ms();
  rec.absolute("fredholm-sphere-kappa1-rpi/2-n3", std::pow(2.0 / std::numbers::pi, 2), value, 1e-6, ms);
  rec.runtime_below("fredholm-sphere-runtime-ms", 10000.0, ms);
}

inline void criterion_2(Recorder& rec) {
  const Stopwatch clock;
  const double value = fourier_determinant(-1.0, 1.0, 2);
  const double ms = clock.elapsed_ms();
  rec.absolute("fredholm-hyperbolic-kappa-1-r1-n2", std::sinh(1.0), value, 1e-6, ms);
  rec.runtime_below("fredholm-hyperbolic-runtime-ms", 10000.0, ms);
}

inline void criterion_3(Recorder& rec) {
  const Stopwatch total;
  for (const double kappa : kGridKappa)
    for (const double r : kGridSpeed)
      for (const int n : kGridDimension) {
        const Stopwatch clock;
        const JacobiSystem sys = constant_curvature_system(kappa, r, n);
        const double gy = gy_ratio(JacobiSystem::zero(n), sys);
        const double fredholm = fredholm_det(sys, kModeSchedule).extrapolated;
        rec.absolute("identity-chain-" + instance_tag(kappa, r, n), fredholm, gy, 1e-5, clock.elapsed_ms());
      }
  rec.runtime_below("identity-chain-runtime-ms", 30000.0, total.elapsed_ms());
}

inline void criterion_4(Recorder& rec) {
  for (const double t : {0.5, 1.0, 1.5, 2.0})
    for (const int n : {1, 2, 3}) {
      const std::string tag = "t" + format_number("%g", t) + "-n" + std::to_string(n);
      rec.absolute("zeta-laplacian-" + tag, std::pow(2.0 * t, n), zeta_det_dirichlet_laplacian(t, n).value, 0.0);
      rec.scaled("zeta-laplacian-zeta-route-" + tag, std::pow(2.0 * t, n),
                 zeta_det_dirichlet_laplacian_power(t, n, 1.0), 1e-13);
    }
  rec.scaled("zeta-power-rule-m2", std::pow(zeta_det_dirichlet_laplacian(1.0, 3).value, 2),
             zeta_det_dirichlet_laplacian_power(1.0, 3, 2.0), 1e-13);
  for (const double kappa : kGridKappa)
    for (const double r : kGridSpeed)
      for (const int n : kGridDimension) {
        const JacobiSystem sys = constant_curvature_system(kappa, r, n);
        const double zeta = zeta_det_jacobi(sys).value;
        const double fredholm = fredholm_det(sys, kModeSchedule).extrapolated;
        rec.absolute("zeta-chain-" + instance_tag(kappa, r, n), fredholm, std::pow(2.0, -n) * zeta, 1e-5);
      }
}

inline void criterion_5(Recorder& rec) {
  for (const double kappa : kGridKappa)
    for (const double r : kGridSpeed)
      for (const int n : kGridDimension) {
        const GeodesicData g{ModelManifold::constant_curvature(n, kappa), r};
        try {
          const TraceReport tr = hessian_trace(g);
          rec.absolute("trace-" + instance_tag(kappa, r, n), -(n - 1) * kappa * r * r / 6.0, tr.spectral_sum, 1e-8);
        } catch (const Error& e) {
          rec.failure("trace-" + instance_tag(kappa, r, n), std::string(e.name()));
        }
      }
  for (const double s : {0.1, 0.3, 0.7}) {
    rec.absolute("bernoulli-series-s" + format_number("%g", s), s * s - s + 1.0 / 6.0,
                 bernoulli_cosine_series(s, 1'000'000), 1e-6);
  }
}

inline void criterion_6(Recorder& rec) {
  for (const int n : {2, 3}) {
    const JacobiSystem sys = constant_curvature_system(1.0, std::numbers::pi, n);
    const DeflatedEstimate d = fredholm_det_deflated(sys, kDefaultKernelTolerance, kModeSchedule);
    const std::string tag = "antipodal-deflated-n" + std::to_string(n);
    rec.absolute(tag, std::pow(2.0, 1 - n), d.estimate.extrapolated, 1e-4);
    rec.absolute(tag + "-kernel-dimension", n - 1, d.kernel_dimension, 0.0);
  }
}

inline void criterion_7(Recorder& rec) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const JacobiSystem deg = JacobiSystem::constant(Matrix::Constant(1, 1, -pi2));
  const double ratio = gy_degenerate_ratio(deg, JacobiSystem::zero(1)).value;
  rec.absolute("degenerate-gy-scalar-vs-product-oracle", degenerate_product_oracle(1'000'000), ratio, 1e-8);
  rec.absolute("degenerate-gy-scalar-vs-closed-form", 1.0 / (2.0 * pi2), ratio, 1e-8);
}

inline void criterion_8(Recorder& rec) {
  for (const int n : {2, 3, 4})
    for (const double R : {0.5, 1.0, 2.0}) {
      const std::string tag = "antipodal-sxy-n" + std::to_string(n) + "-R" + format_number("%g", R);
      rec.absolute(tag, antipodal_sphere_limit_closed_form(n, R), antipodal_limit_via_Sxy(n, R), 1e-8);
    }
}

inline void criterion_9(Recorder& rec) {
  const Stopwatch clock;
  const HeatLimitReport s2 = heat_limit_validation(2, 1.0, HeatCase::Antipodal);
  rec.scaled("antipodal-S2-coefficient", 2.0 * std::numbers::pi * std::numbers::pi,
             s2.extrapolated_oracle, 0.01);
  const HeatLimitReport s3 = heat_limit_validation(3, 1.0, HeatCase::Nondegenerate, std::numbers::pi / 2);
  rec.scaled("nondegenerate-S3-d-pi/2", std::numbers::pi / 2, s3.extrapolated_oracle, 0.005);
  rec.runtime_below("heat-oracle-runtime-ms", 60000.0, clock.elapsed_ms());
}

inline void criterion_10(Recorder& rec) {
  const GeodesicData sphere{ModelManifold::constant_curvature(2, 1.0), std::numbers::pi / 2};
  std::vector<double> mesh, defect;
  for (const int N : {4, 8, 16, 32, 64}) {
    const Partition tau = Partition::uniform(N);
    mesh.push_back(tau.mesh());
    defect.push_back(evaluation_map_jacobian(sphere, tau) - 1.0);
  }
  rec.at_least("eval-jacobian-loglog-slope", 2.7, loglog_slope(mesh, defect));
  const GeodesicData flat{ModelManifold::constant_curvature(2, 0.0), 1.3};
  double worst = 0.0;
  for (const int N : {4, 8, 16, 32, 64}) {
    worst = std::max(worst, std::abs(evaluation_map_jacobian(flat, Partition::uniform(N)) - 1.0));
  }
  rec.absolute("eval-jacobian-flat-exact", 0.0, worst, 2.0 * std::numeric_limits<double>::epsilon());
}

inline void criterion_11(Recorder& rec) {
  struct Instance {
    double kappa, r;
    int n;
  };
  for (const Instance inst : {Instance{1.0, std::numbers::pi / 2, 3}, Instance{-1.0, 1.0, 2}, Instance{0.3, 1.0, 2}}) {
    const JacobiSystem sys = constant_curvature_system(inst.kappa, inst.r, inst.n);
    const double fourier = fredholm_det(sys, kModeSchedule).extrapolated;
    const std::array<int, 6> schedule{8, 16, 32, 64, 128, 256};
    const DeterminantEstimate piecewise = piecewise_det(sys, schedule);
    std::vector<double> gaps;
    for (const auto& level : piecewise.levels) gaps.push_back(std::abs(level.extrapolated - fourier));
    int violations = 0;
    for (std::size_t j = 1; j < gaps.size(); ++j)
      if (!(gaps[j] < gaps[j - 1])) ++violations;
    const std::string tag = "filtration-" + instance_tag(inst.kappa, inst.r, inst.n);
    rec.absolute(tag + "-gap-N256-K512", 0.0, gaps.back(), 1e-3);
    rec.absolute(tag + "-monotone-violations", 0.0, violations, 0.0);
  }
}

/// Determinism is checked by the caller-supplied report generator, if any.
inline std::function<std::string()>& determinism_probe() {
  static std::function<std::string()> probe;
  return probe;
}

inline void criterion_12(Recorder& rec) {
  // Wronskian conservation
  const std::vector<std::pair<std::string, JacobiSystem>> systems = {
      {"sphere", constant_curvature_system(1.0, 2.0, 3)},
      {"hyperbolic", constant_curvature_system(-1.0, 1.5, 3)},
      {"coupled", JacobiSystem::from_function(2, 1.0, [](double s) {
         Matrix v(2, 2);
         v << std::sin(3.0 * s), 0.5 * s, 0.5 * s, -2.0 + s * s;
         return v;
       })}};
  for (const auto& [name, sys] : systems) {
    for (const int steps : {512, 2048}) {
      const JacobiPropagation prop = solve_jacobi_ode(sys, steps);
      rec.at_most("wronskian-" + name + "-steps" + std::to_string(steps), 1e-9, prop.max_wronskian_drift());
    }
  }
  // RK4 order: scalar V = 1, exact J(1) = sinh(1)
  {
    const JacobiSystem sys = JacobiSystem::constant(Matrix::Constant(1, 1, 4.0));
    const double exact = std::sinh(2.0) / 2.0;
    const double e1 = std::abs(solve_jacobi_ode(sys, 32).final_J()(0, 0) - exact);
    const double e2 = std::abs(solve_jacobi_ode(sys, 64).final_J()(0, 0) - exact);
    rec.at_least("rk4-halving-factor-lower", 12.0, e1 / e2);
    rec.at_most("rk4-halving-factor-upper", 20.0, e1 / e2);
  }
  // Chapman-Kolmogorov on the circle
  for (const int node : {0, 40, 128}) {
    rec.absolute("chapman-kolmogorov-S1-node" + std::to_string(node), 0.0,
                 circle_chapman_kolmogorov_defect(0.05, 0.1, node, 256), 1e-8);
  }
  // telescoping product
  for (const int K : {10, 100, 1000, 10000}) {
    double product = 1.0;
    for (int k = 2; k <= K; ++k) product *= 1.0 - 1.0 / (static_cast<double>(k) * k);
    rec.at_most("telescoping-K" + std::to_string(K), 1.0 / K, std::abs(product - 0.5));
  }
  // deterministic reports
  if (auto& probe = determinism_probe(); probe) {
    const std::string first = probe();
    const std::string second = probe();
    rec.absolute("determinism-byte-identical", 1.0, first == second ? 1.0 : 0.0, 0.0);
  } else {
    // direct numeric repeat when no report generator is installed
    const double a = fourier_determinant(0.3, 1.0, 3);
    const double b = fourier_determinant(0.3, 1.0, 3);
    rec.absolute("determinism-byte-identical", 1.0, a == b ? 1.0 : 0.0, 0.0);
  }
}

inline const char* criterion_title(int id) {
  static constexpr const char* titles[] = {
      "",
      "constant-curvature Fredholm determinant (kappa=1, r=pi/2, n=3)",
      "hyperbolic Fredholm determinant (kappa=-1, r=1, n=2)",
      "Gel'fand-Yaglom identity against the Galerkin determinant on the grid",
      "zeta determinant closed form and zeta-relativity chain",
      "trace identity and Bernoulli series",
      "deflated antipodal determinant and kernel dimension",
      "degenerate Gel'fand-Yaglom ratio against the eigenvalue product",
      "degenerate heat coefficient via S_xy against the closed form",
      "heat-kernel oracle confirmation (S^2 antipodal, S^3 nondegenerate)",
      "evaluation-map Jacobian convergence order and flat case",
      "filtration independence (Fourier vs piecewise linear)",
      "property suites (Wronskian, RK4 order, Chapman-Kolmogorov, telescoping, determinism)",
  };
  return id >= 1 && id <= kCriterionCount ? titles[id] : "unknown";
}

}  // namespace validation

inline CriterionResult run_criterion(int id) {
  using namespace validation;
  static const std::function<void(Recorder&)> table[] = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,  criterion_6,
      criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12};
  require(id >= 1 && id <= kCriterionCount, ErrorKind::Usage, "no such criterion");
  CriterionResult result;
  result.id = id;
  result.title = criterion_title(id);
  Recorder rec(result.records);
  const Stopwatch clock;
  try {
    table[id - 1](rec);
  } catch (const Error& e) {
    rec.failure("criterion-" + std::to_string(id), std::string(e.name()) + ": " + e.what());
  }
  result.runtime_ms = clock.elapsed_ms();
  return result;
}

/// All records of all criteria, ordered by record name.
inline std::vector<ValidationRecord> validate() {
  std::vector<ValidationRecord> all;
  for (int id = 1; id <= kCriterionCount; ++id) {
    CriterionResult r = run_criterion(id);
    for (auto& rec : r.records) all.push_back(std::move(rec));
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.check_name < b.check_name; });
  return all;
}

}  // namespace geodet
