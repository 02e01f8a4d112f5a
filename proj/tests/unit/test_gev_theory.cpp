#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rfamado/error.hpp"
#include "rfamado/gev_theory.hpp"
#include "rfamado/quadrature.hpp"
#include "rfamado/simulate.hpp"

using namespace rfamado;

namespace {

double closed_form_at_ratio(double alpha) {
  const double theta = std::exp2(alpha);
  return theta / (theta + 1.0) - 0.5;
}

}  // namespace

TEST(Quadrature, KnownIntegrals) {
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value, 2.0, 1e-12);
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x); }, 0.0, 30.0).value, 1.0 - std::exp(-30.0),
              1e-12);
  for (const double a : {0.05, 0.5, 3.0}) {
    const auto r = integrate([a](double u) { return std::pow(u, a); }, 0.0, 1.0);
    EXPECT_NEAR(r.value, 1.0 / (1.0 + a), 1e-8) << a;
    EXPECT_LE(r.subdivisions, 200);
  }
  // Integrable log singularity at 0.
  EXPECT_NEAR(integrate([](double u) { return -std::log(u); }, 0.0, 1.0).value, 1.0, 1e-8);
}

TEST(Quadrature, Failures) {
  QuadratureConfig tight;
  tight.abs_tol = 1e-14;
  tight.max_subdivisions = 2;
  EXPECT_THROW(integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, tight),
               NumericError);
  EXPECT_THROW(integrate([](double) { return NAN; }, 0.0, 1.0), NumericError);
  QuadratureConfig bad;
  bad.abs_tol = 0.0;
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_THROW(integrate([](double x) { return x; }, 0.0, INFINITY), DomainError);
}

TEST(Logistic, DependenceFunction) {
  EXPECT_NEAR(logistic_V(1.0, 1.0, 0.5), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(logistic_V(2.0, 3.0, 1.0), 0.5 + 1.0 / 3.0, 1e-15);
  // Homogeneous of order -1.
  EXPECT_NEAR(logistic_V(4.0, 6.0, 0.3), logistic_V(2.0, 3.0, 0.3) / 2.0, 1e-15);
  // alpha -> 0 tends to max(1/x, 1/y) without overflow.
  EXPECT_NEAR(logistic_V(2.0, 5.0, 1e-3), 0.5, 1e-3);
  EXPECT_THROW(logistic_V(0.0, 1.0, 0.5), DomainError);
  EXPECT_THROW(logistic_V(1.0, 1.0, 1.5), DomainError);
}

TEST(Logistic, ExtremalCoefficient) {
  EXPECT_DOUBLE_EQ(extremal_coefficient(1.0), 2.0);
  EXPECT_DOUBLE_EQ(extremal_coefficient(0.5), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(extremal_coefficient_from_d(0.0), 1.0);
  EXPECT_NEAR(extremal_coefficient_from_d(1.0 / 6.0), 2.0, 1e-15);
  for (const double a : {0.1, 0.4, 0.9})
    EXPECT_NEAR(extremal_coefficient_from_d(closed_form_at_ratio(a)), std::exp2(a), 1e-13);
  EXPECT_THROW(extremal_coefficient_from_d(0.5), DomainError);
  EXPECT_THROW(extremal_coefficient_from_d(-0.1), DomainError);
}

TEST(GevMargin, CdfAndQuantileInvert) {
  const GevMargin m{2.5, 0.2};
  for (const double u : {1e-6, 0.1, 0.5, 0.9, 1.0 - 1e-9})
    EXPECT_NEAR(m.cdf(m.quantile(u)), u, 1e-12 * std::max(1.0, u / (1.0 - u)));
  EXPECT_EQ(m.cdf(0.0), 0.0);
  EXPECT_EQ(m.cdf(-1.0), 0.0);
  EXPECT_NEAR(m.cdf(2.5), std::exp(-1.0), 1e-15);
  EXPECT_THROW((GevMargin{0.0, 0.1}).validate(), DomainError);
  EXPECT_THROW((GevMargin{1.0, -0.1}).validate(), DomainError);
}

TEST(BivariateGev, JointCdfLimits) {
  const BivariateGevSpec indep{{1.0, 0.1}, {2.0, 0.3}, 1.0};
  EXPECT_NEAR(indep.joint_cdf(1.1, 2.5), indep.m1.cdf(1.1) * indep.m2.cdf(2.5), 1e-14);
  const BivariateGevSpec dep{{1.0, 0.1}, {1.0, 0.1}, 0.3};
  // Margin recovery as the other argument grows.
  EXPECT_NEAR(dep.joint_cdf(1.2, 1e6), dep.m1.cdf(1.2), 1e-12);
  // Diagonal: F(x)^theta.
  EXPECT_NEAR(dep.joint_cdf(1.3, 1.3), std::pow(dep.m1.cdf(1.3), std::exp2(0.3)), 1e-14);
}

TEST(TheoreticalD, ClosedFormAtScaleRatio) {
  for (const double alpha : {0.01, 0.25, 0.5, 0.75, 1.0}) {
    const BivariateGevSpec s{{1.5, 0.2}, {3.0, 0.2}, alpha};
    EXPECT_NEAR(theoretical_D_homogeneous(s, 2.0), closed_form_at_ratio(alpha), 1e-12) << alpha;
  }
  const BivariateGevSpec half{{1.0, 0.1}, {1.0, 0.1}, 0.5};
  EXPECT_NEAR(theoretical_D_homogeneous(half, 1.0), 0.085786, 5e-7);
  const BivariateGevSpec ind{{1.0, 0.1}, {1.0, 0.1}, 1.0};
  EXPECT_NEAR(theoretical_D_homogeneous(ind, 1.0), 1.0 / 6.0, 1e-15);
}

TEST(TheoreticalD, ClosedFormIsMinimisedAtScaleRatio) {
  const BivariateGevSpec s{{1.0, 0.15}, {2.0, 0.15}, 0.4};
  const double at_ratio = theoretical_D_homogeneous(s, 2.0);
  for (const double c : {0.5, 1.0, 1.8, 1.99, 2.01, 2.2, 4.0})
    EXPECT_GT(theoretical_D_homogeneous(s, c), at_ratio) << c;
  EXPECT_THROW(theoretical_D_homogeneous({{1.0, 0.1}, {1.0, 0.2}, 0.5}, 1.0), DomainError);
  EXPECT_THROW(theoretical_D_homogeneous(s, 0.0), DomainError);
}

TEST(TheoreticalD, GeneralMatchesClosedFormOnEqualShapes) {
  for (const double alpha : {0.05, 0.3, 0.7, 1.0})
    for (const double c : {0.2, 0.5, 1.0, 1.7, 3.0, 9.0}) {
      const BivariateGevSpec s{{1.0, 0.1}, {1.5, 0.1}, alpha};
      EXPECT_NEAR(theoretical_D_general(s, c), theoretical_D_homogeneous(s, c), 1e-7)
          << alpha << ' ' << c;
    }
}

TEST(TheoreticalD, GeneralMatchesMonteCarloOnUnequalShapes) {
  const BivariateGevSpec s{{1.0, 0.1}, {1.3, 0.03}, 0.4};
  const auto sample = sample_bivariate_logistic(s, 400000, 99);
  for (const double c : {0.8, 1.3, 1.6}) {
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < sample.y1.size(); ++i) {
      const double v = 0.5 * std::abs(s.m2.cdf(c * sample.y1[i]) - s.m1.cdf(sample.y2[i] / c));
      sum += v;
      sum2 += v * v;
    }
    const double n = static_cast<double>(sample.y1.size());
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(theoretical_D_general(s, c), mean, 4.0 * se + 1e-9) << c;
  }
}

TEST(TheoreticalD, MinimiserForEqualShapes) {
  const BivariateGevSpec s{{1.0, 0.2}, {2.5, 0.2}, 0.6};
  const auto opt = minimize_theoretical_D(s);
  EXPECT_NEAR(opt.c_star, 2.5, 1e-4);
  EXPECT_NEAR(opt.d_star, closed_form_at_ratio(0.6), 1e-9);
}

TEST(TheoreticalD, MinimiserBeatsNeighboursForUnequalShapes) {
  const BivariateGevSpec s{{1.0, 0.05}, {1.0, 0.02}, 0.3};
  const auto opt = minimize_theoretical_D(s);
  for (const double f : {0.9, 0.97, 1.03, 1.1})
    EXPECT_GE(theoretical_D_general(s, opt.c_star * f), opt.d_star - 1e-9) << f;
}

TEST(Surface, CornersOrderAndMonotonicity) {
  const std::vector<double> alphas{0.01, 0.5, 1.0};
  const std::vector<double> ratios{1.0, 2.0, 5.0, 10.0};
  const auto cells = optimal_dissimilarity_surface(alphas, ratios, 0.01, {}, 2);
  ASSERT_EQ(cells.size(), 12u);
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    EXPECT_EQ(cells[a * ratios.size()].alpha, alphas[a]);
    EXPECT_NEAR(cells[a * ratios.size()].d_star, closed_form_at_ratio(alphas[a]), 1e-9);
    EXPECT_NEAR(cells[a * ratios.size()].c_star, 1.0, 1e-4);
    for (std::size_t r = 1; r < ratios.size(); ++r)
      EXPECT_GT(cells[a * ratios.size() + r].d_star, cells[a * ratios.size() + r - 1].d_star);
  }
  for (std::size_t r = 0; r < ratios.size(); ++r)
    for (std::size_t a = 1; a < alphas.size(); ++a)
      EXPECT_GT(cells[a * ratios.size() + r].d_star, cells[(a - 1) * ratios.size() + r].d_star);
  // Deterministic regardless of workers.
  const auto serial = optimal_dissimilarity_surface(alphas, ratios, 0.01, {}, 1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    EXPECT_EQ(cells[i].d_star, serial[i].d_star);
    EXPECT_EQ(cells[i].c_star, serial[i].c_star);
  }
}
