#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "geodet/gelfand_yaglom.hpp"
#include "geodet/model_geometry.hpp"
#include "oracles.hpp"

using namespace geodet;

namespace {

double scalar_jacobi(double mu) {
  // J'' = mu J, J(0) = 0, J'(0) = 1, evaluated at 1
  if (mu > 0) return std::sinh(std::sqrt(mu)) / std::sqrt(mu);
  if (mu < 0) return std::sin(std::sqrt(-mu)) / std::sqrt(-mu);
  return 1.0;
}

JacobiSystem coupled_system() {
  return JacobiSystem::from_function(2, 1.0, [](double s) {
    Matrix v(2, 2);
    v << std::sin(3.0 * s), 0.5 * s, 0.5 * s, -2.0 + s * s;
    return v;
  });
}

}  // namespace

TEST(JacobiOde, ScalarClosedForms) {
  for (const double mu : {-9.0, -1.0, 0.0, 2.0, 6.0}) {
    const auto prop = solve_jacobi_ode(JacobiSystem::constant(Matrix::Constant(1, 1, mu)), 2048);
    EXPECT_NEAR(prop.final_J()(0, 0), scalar_jacobi(mu), 1e-11) << mu;
    EXPECT_LT(prop.error_estimate, 1e-10);
  }
}

TEST(JacobiOde, RandomConstantPotentialsDiagonalize) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    Matrix v = oracle::random_symmetric(rng, n, 1.5) - Matrix::Identity(n, n);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(v);
    double expected = 1.0;
    for (int i = 0; i < n; ++i) expected *= scalar_jacobi(eig.eigenvalues()(i));
    const auto prop = solve_jacobi_ode(JacobiSystem::constant(v), 1024);
    EXPECT_NEAR(prop.final_J().determinant(), expected, 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST(JacobiOde, WronskianIsConserved) {
  const auto prop = solve_jacobi_ode(coupled_system(), 1024);
  EXPECT_LT(prop.max_wronskian_drift(), 1e-9);
}

TEST(JacobiOde, Rk4StepHalvingFactor) {
  const JacobiSystem sys = JacobiSystem::constant(Matrix::Constant(1, 1, 4.0));
  const double exact = std::sinh(2.0) / 2.0;
  const double e1 = std::abs(solve_jacobi_ode(sys, 32).final_J()(0, 0) - exact);
  const double e2 = std::abs(solve_jacobi_ode(sys, 64).final_J()(0, 0) - exact);
  EXPECT_GE(e1 / e2, 12.0);
  EXPECT_LE(e1 / e2, 20.0);
}

TEST(JacobiOde, TooFewStepsIsRejected) { EXPECT_THROW(solve_jacobi_ode(JacobiSystem::zero(1), 4), Error); }

TEST(JacobiOde, GramIntegralOfFreeSolution) {
  const auto prop = solve_jacobi_ode(JacobiSystem::zero(2, 2.0), 256);
  EXPECT_NEAR(prop.gram_integral()(0, 0), 8.0 / 3.0, 1e-12);
  EXPECT_NEAR(prop.gram_integral()(0, 1), 0.0, 1e-14);
}

TEST(TransferMatrix, IntervalSplitting) {
  const JacobiSystem sys = coupled_system();
  const Matrix whole = transfer_matrix(sys, 0.0, 1.0, 2000);
  const Matrix split = transfer_matrix(sys, 0.4, 1.0, 1200) * transfer_matrix(sys, 0.0, 0.4, 800);
  EXPECT_LT((whole - split).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(GyRatio, MatchesEigenvalueProductOnGrid) {
  for (const double kappa : {-1.0, -0.3, 0.3, 1.0})
    for (const double r : {0.1, 0.5, 1.0})
      for (const int n : {2, 3}) {
        const JacobiSystem sys = jacobi_endomorphism({ModelManifold::constant_curvature(n, kappa), r});
        EXPECT_NEAR(gy_ratio(JacobiSystem::zero(n), sys), oracle::curvature_product(kappa, r, n, 200000), 1e-9);
      }
}

TEST(GyRatio, QuarterSphereIsFourOverPiSquared) {
  const JacobiSystem sys = jacobi_endomorphism({ModelManifold::constant_curvature(3, 1.0), std::numbers::pi / 2});
  EXPECT_NEAR(gy_ratio(JacobiSystem::zero(3), sys), 4.0 / (std::numbers::pi * std::numbers::pi), 1e-10);
}

TEST(GyRatio, RatioIsMultiplicative) {
  const JacobiSystem a = JacobiSystem::constant(Matrix::Constant(1, 1, 1.0));
  const JacobiSystem b = JacobiSystem::constant(Matrix::Constant(1, 1, -2.0));
  const JacobiSystem c1 = JacobiSystem::from_function(1, 1.0, [](double s) { return Matrix::Constant(1, 1, std::cos(s)); });
  EXPECT_NEAR(gy_ratio(a, b) * gy_ratio(b, c1), gy_ratio(a, c1), 1e-12);
}

TEST(GyRatio, BeyondConjugatePointIsNonpositive) {
  const JacobiSystem sys = jacobi_endomorphism({ModelManifold::constant_curvature(2, 1.0), 4.0});
  try {
    gy_ratio(JacobiSystem::zero(2), sys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonpositiveOperator);
  }
}

TEST(DegenerateGy, ScalarPiSquared) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const auto d = gy_degenerate_ratio(JacobiSystem::constant(Matrix::Constant(1, 1, -pi2)), JacobiSystem::zero(1));
  EXPECT_EQ(d.zero_modes, 1);
  // det'(-d^2 - pi^2) / det(-d^2) = prod_{k>=2} (1 - 1/k^2) / pi^2
  double product = 1.0;
  for (long k = 2; k <= 2000000; ++k) product *= 1.0 - 1.0 / (static_cast<double>(k) * k);
  product *= std::exp(-oracle::inverse_square_tail(2000000));
  EXPECT_NEAR(d.value, product / pi2, 1e-9);
}

TEST(DegenerateGy, PartialKernel) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  Matrix v = Matrix::Zero(2, 2);
  v(1, 1) = -pi2;
  const auto d = gy_degenerate_ratio(JacobiSystem::constant(v), JacobiSystem::zero(2));
  EXPECT_EQ(d.zero_modes, 1);
  EXPECT_NEAR(d.value, 1.0 / (2.0 * pi2), 1e-9);
}

TEST(DegenerateGy, RotatedPartialKernelIsInvariant) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  Matrix v = Matrix::Zero(2, 2);
  v(1, 1) = -pi2;
  const double angle = 0.7;
  Matrix q(2, 2);
  q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  const Matrix rotated = q * v * q.transpose();
  const auto d = gy_degenerate_ratio(JacobiSystem::constant(0.5 * (rotated + rotated.transpose())), JacobiSystem::zero(2));
  EXPECT_NEAR(d.value, 1.0 / (2.0 * pi2), 1e-9);
}

TEST(DegenerateGy, NondegenerateOperatorIsWrongRoute) {
  try {
    gy_degenerate_ratio(JacobiSystem::zero(1), JacobiSystem::zero(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WrongRoute);
  }
}

TEST(Zeta, LaplacianClosedForm) {
  EXPECT_EQ(zeta_det_dirichlet_laplacian(1.0, 3).value, 8.0);
  EXPECT_EQ(zeta_det_dirichlet_laplacian(1.0, 3).route, ZetaRoute::ClosedForm);
  EXPECT_NEAR(zeta_det_dirichlet_laplacian_power(1.0, 3, 1.0), 8.0, 1e-13);
  EXPECT_NEAR(zeta_det_dirichlet_laplacian_power(2.5, 2, 2.0), std::pow(25.0, 2), 1e-10);
  EXPECT_THROW(zeta_det_dirichlet_laplacian(0.0, 1), Error);
}

TEST(Zeta, JacobiRelativity) {
  for (const double kappa : {-1.0, 0.3, 1.0})
    for (const int n : {2, 3}) {
      const JacobiSystem sys = jacobi_endomorphism({ModelManifold::constant_curvature(n, kappa), 1.0});
      const ZetaDetValue z = zeta_det_jacobi(sys);
      EXPECT_EQ(z.route, ZetaRoute::GyRatio);
      EXPECT_NEAR(std::pow(2.0, -n) * z.value, oracle::curvature_product(kappa, 1.0, n, 200000), 1e-9);
    }
}

TEST(Zeta, JacobiDegenerateExcludesZeroModes) {
  const JacobiSystem sys = jacobi_endomorphism({ModelManifold::constant_curvature(3, 1.0), std::numbers::pi});
  const ZetaDetValue z = zeta_det_jacobi(sys);
  EXPECT_EQ(z.route, ZetaRoute::Deflated);
  EXPECT_EQ(z.excluded_zero_modes, 2);
}

TEST(PropagationCsv, HeaderAndRowCount) {
  const auto prop = solve_jacobi_ode(JacobiSystem::zero(2), 16);
  std::ostringstream os;
  write_propagation_csv(os, prop);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "s,J_11,J_12,J_21,J_22,Jp_11,Jp_12,Jp_21,Jp_22");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 18);
}
