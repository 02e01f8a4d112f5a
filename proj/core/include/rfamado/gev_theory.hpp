#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "rfamado/quadrature.hpp"

namespace rfamado {

/// Frechet-type GEV margin with location 0: F(x) = exp{-(x / sigma)^(-1/xi)}.
struct GevMargin {
  double sigma = 1.0;
  double xi = 0.1;

  void validate() const;
  double cdf(double x) const;
  double quantile(double u) const;
};

/// Two GEV margins joined by the logistic dependence function with
/// parameter alpha in (0, 1]; alpha = 1 is independence.
struct BivariateGevSpec {
  GevMargin m1;
  GevMargin m2;
  double alpha = 1.0;

  void validate() const;
  /// P(Y1 <= x, Y2 <= y) = exp[-V{-1/log F1(x), -1/log F2(y)}].
  double joint_cdf(double x, double y) const;
};

/// V(x, y) = (x^(-1/alpha) + y^(-1/alpha))^alpha, evaluated in log space.
double logistic_V(double x, double y, double alpha);
/// log V from log x and log y; safe for alpha near 0.
double log_logistic_V(double log_x, double log_y, double alpha) noexcept;

/// theta = V(1, 1) = 2^alpha.
double extremal_coefficient(double alpha);

/// Inverts d = theta / (theta + 1) - 1/2: theta = (1 + 2d) / (1 - 2d).
/// Accepts d in [0, 1/2).
double extremal_coefficient_from_d(double d);

/// Closed form for equal shapes:
///   D(c) = theta_c / (theta_c + 1) - 1/(2(1 + a12)) - 1/(2(1 + a21))
/// with a12 = (c sigma1 / sigma2)^(-1/xi) = 1 / a21 and theta_c = V(a12, a21).
/// Throws DomainError when xi1 != xi2.
double theoretical_D_homogeneous(const BivariateGevSpec& spec, double c);

/// General D(c) for unequal shapes:
///   E[1 - exp{-V((a12 / T)^r, (a21 / T)^(1/r))}]
///   - 1/2 E[exp(-a12 W1)] - 1/2 E[exp(-a21 W2)],
/// T ~ Exp(1), r = xi2 / xi1, W1 = T^(1/r), W2 = T^r (so P(W1 > w) =
/// exp(-w^r)). Each expectation is integrated over x = log T with a
/// breakpoint where the integrand switches level, which keeps the
/// quadrature accurate when a12 or a21 is extreme.
double theoretical_D_general(const BivariateGevSpec& spec, double c,
                             const QuadratureConfig& quad = {});

struct TheoreticalOptimum {
  double c_star;
  double d_star;
};

/// Minimises theoretical_D_general over c: a scan of log c around
/// log(sigma2 / sigma1) in steps of min(xi1, xi2) / 2, then Brent refinement
/// inside the bracketing cell.
TheoreticalOptimum minimize_theoretical_D(const BivariateGevSpec& spec,
                                          const QuadratureConfig& quad = {});

struct SurfaceCell {
  double alpha;
  double ratio;   ///< xi1 / xi2
  double c_star;
  double d_star;
};

/// D(c*) on the (alpha, xi1/xi2) grid with sigma1 = sigma2 = 1 and
/// xi1 = ratio * xi2. Cells are ordered alpha-major; computed in parallel
/// with deterministic placement.
std::vector<SurfaceCell> optimal_dissimilarity_surface(std::span<const double> alphas,
                                                       std::span<const double> ratios, double xi2,
                                                       const QuadratureConfig& quad = {},
                                                       unsigned threads = 1);

/// CSV with header `alpha,ratio,d_star,c_star`.
void write_surface_csv(std::ostream& out, const std::vector<SurfaceCell>& cells);

}  // namespace rfamado
