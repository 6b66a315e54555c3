#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "geodet/interval_spectrum.hpp"
#include "geodet/quadrature.hpp"
#include "oracles.hpp"

using namespace geodet;

TEST(DirichletSpectrum, EigenvaluesOnShiftedInterval) {
  const IntervalGrid grid{1.0, 3.0};
  const auto ev = dirichlet_eigenvalues(grid, 3, 5);
  ASSERT_EQ(ev.size(), 5u);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_NEAR(ev[k - 1].value, std::numbers::pi * std::numbers::pi * k * k / 4.0, 1e-12);
    EXPECT_EQ(ev[k - 1].multiplicity, 3);
  }
}

TEST(DirichletSpectrum, UnitIntervalFirstEigenvalue) {
  EXPECT_DOUBLE_EQ(dirichlet_eigenvalue({0.0, 1.0}, 1), std::numbers::pi * std::numbers::pi);
}

TEST(DirichletSpectrum, EmptyRequestIsRejected) {
  try {
    dirichlet_eigenvalues({0.0, 1.0}, 2, 0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyRequest);
  }
}

TEST(DirichletSpectrum, DegenerateIntervalIsRejected) {
  EXPECT_THROW(dirichlet_eigenvalues({2.0, 2.0}, 1, 3), Error);
}

TEST(ModeIndexing, FlatOrderIsFrequencyMajor) {
  const int n = 3;
  EXPECT_EQ(flat_index({1, 1}, n), 0);
  EXPECT_EQ(flat_index({3, 1}, n), 2);
  EXPECT_EQ(flat_index({1, 2}, n), 3);
  for (int flat = 0; flat < 30; ++flat) {
    const ModeIndex m = mode_at(flat, n);
    EXPECT_EQ(flat_index(m, n), flat);
  }
}

TEST(Basis, L2OrthonormalityAgainstAdaptiveQuadrature) {
  const IntervalGrid grid{0.5, 2.0};
  for (int k = 1; k <= 4; ++k)
    for (int l = 1; l <= 4; ++l) {
      const double ip = oracle::simpson(
          [&](double s) { return basis_profile(k, grid, Basis::L2, s) * basis_profile(l, grid, Basis::L2, s); },
          grid.a, grid.b);
      EXPECT_NEAR(ip, k == l ? 1.0 : 0.0, 1e-9) << k << "," << l;
    }
}

TEST(Basis, H1OrthonormalityOfDerivatives) {
  const IntervalGrid grid{0.0, 1.7};
  for (int k = 1; k <= 4; ++k)
    for (int l = 1; l <= 4; ++l) {
      const double ip = oracle::simpson(
          [&](double s) {
            return basis_profile_derivative(k, grid, Basis::H1, s) * basis_profile_derivative(l, grid, Basis::H1, s);
          },
          grid.a, grid.b);
      EXPECT_NEAR(ip, k == l ? 1.0 : 0.0, 1e-9);
    }
}

TEST(Basis, H1IsScaledL2) {
  const IntervalGrid grid{0.0, 2.0};
  for (int k = 1; k <= 5; ++k) {
    const double s = 0.37;
    EXPECT_NEAR(basis_profile(k, grid, Basis::H1, s),
                basis_profile(k, grid, Basis::L2, s) / std::sqrt(dirichlet_eigenvalue(grid, k)), 1e-14);
  }
}

TEST(Basis, DerivativeMatchesFiniteDifference) {
  const IntervalGrid grid{0.0, 1.0};
  const double h = 1e-6;
  for (int k = 1; k <= 3; ++k) {
    const double s = 0.41;
    const double fd =
        (basis_profile(k, grid, Basis::L2, s + h) - basis_profile(k, grid, Basis::L2, s - h)) / (2 * h);
    EXPECT_NEAR(basis_profile_derivative(k, grid, Basis::L2, s), fd, 1e-6);
  }
}

TEST(Basis, VanishesAtEndpointsAndFillsOneSlot) {
  const IntervalGrid grid{0.0, 1.0};
  EXPECT_EQ(basis_function({2, 3}, grid, 3, Basis::L2, 0.0).norm(), 0.0);
  EXPECT_EQ(basis_function({2, 3}, grid, 3, Basis::L2, 1.0).norm(), 0.0);
  const auto v = basis_function({2, 3}, grid, 3, Basis::L2, 0.1);
  EXPECT_EQ(v(0), 0.0);
  EXPECT_EQ(v(2), 0.0);
  EXPECT_NEAR(v(1), std::sqrt(2.0) * std::sin(0.3 * std::numbers::pi), 1e-14);
}

TEST(Basis, OutsideIntervalIsDomainError) {
  try {
    basis_function({1, 1}, {0.0, 1.0}, 1, Basis::L2, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Basis, SineProductIntegralMatchesQuadrature) {
  const IntervalGrid grid{-1.0, 2.0};
  for (int k = 1; k <= 3; ++k)
    for (int l = 1; l <= 3; ++l) {
      const double L = grid.length();
      const double q = oracle::simpson(
          [&](double s) {
            return std::sin(std::numbers::pi * k * (s - grid.a) / L) * std::sin(std::numbers::pi * l * (s - grid.a) / L);
          },
          grid.a, grid.b);
      EXPECT_NEAR(sine_product_integral(k, l, grid), q, 1e-10);
    }
}

TEST(Sobolev, NormOrderZeroIsEuclidean) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::vector<double> c(12);
  double sq = 0.0;
  for (auto& x : c) {
    x = normal(rng);
    sq += x * x;
  }
  const SpectralCoefficients coeffs(2, {0.0, 1.0}, c);
  EXPECT_NEAR(sobolev_norm(coeffs, 0.0), std::sqrt(sq), 1e-12);
}

TEST(Sobolev, EmbeddingInequalityOnRandomFields) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  const IntervalGrid grid{0.0, 2.5};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c(3 * 20);
    for (auto& x : c) x = normal(rng) / (1.0 + trial % 7);
    const SpectralCoefficients coeffs(3, grid, c);
    for (const auto [l, m] : {std::pair{0.0, 1.0}, {0.5, 2.0}, {1.0, 1.0}}) {
      EXPECT_LE(sobolev_norm(coeffs, l), sobolev_embedding_constant(grid, l, m) * sobolev_norm(coeffs, m) * (1 + 1e-12));
    }
  }
}

TEST(Sobolev, EmbeddingConstantIsSharpOnFirstMode) {
  const IntervalGrid grid{0.0, 3.0};
  SpectralCoefficients x = SpectralCoefficients::zero(1, grid, 4);
  x[{1, 1}] = 1.0;
  EXPECT_NEAR(sobolev_norm(x, 0.0), sobolev_embedding_constant(grid, 0.0, 1.0) * sobolev_norm(x, 1.0), 1e-14);
}

TEST(Sobolev, H1NormEqualsDerivativeL2Norm) {
  const IntervalGrid grid{0.0, 1.3};
  SpectralCoefficients x = SpectralCoefficients::zero(1, grid, 3);
  x[{1, 1}] = 0.7;
  x[{1, 3}] = -0.2;
  const double energy = oracle::simpson(
      [&](double s) {
        const double d = 0.7 * basis_profile_derivative(1, grid, Basis::L2, s) -
                         0.2 * basis_profile_derivative(3, grid, Basis::L2, s);
        return d * d;
      },
      grid.a, grid.b);
  EXPECT_NEAR(sobolev_norm(x, 1.0), std::sqrt(energy), 1e-9);
}

TEST(Quadrature, GaussLegendreExactOnPolynomials) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (const int order : {1, 2, 5, 8, 16}) {
    const QuadratureRule rule = gauss_legendre(order);
    std::vector<double> c(2 * order);
    for (auto& x : c) x = coef(rng);
    double exact = 0.0;
    for (std::size_t p = 0; p < c.size(); ++p)
      if (p % 2 == 0) exact += 2.0 * c[p] / (p + 1.0);
    const double q = rule.integrate([&](double x) {
      double v = 0.0;
      for (std::size_t p = c.size(); p-- > 0;) v = v * x + c[p];
      return v;
    });
    EXPECT_NEAR(q, exact, 1e-13) << "order " << order;
  }
}

TEST(Quadrature, CompositeRuleMatchesAdaptiveSimpson) {
  const auto rule = composite_gauss_legendre(0.0, 3.0, 12, 6);
  const auto f = [](double s) { return std::exp(-s) * std::cos(5 * s); };
  EXPECT_NEAR(rule.integrate(f), oracle::simpson(f, 0.0, 3.0), 1e-11);
}
