#pragma once

#include <cstddef>
#include <functional>

namespace rfamado {

struct QuadratureConfig {
  double abs_tol = 1e-8;
  int max_subdivisions = 200;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;      ///< summed error estimate over the final intervals
  int subdivisions = 0;    ///< number of intervals in the final partition
};

/// Globally adaptive Gauss-Kronrod (G10/K21, QUADPACK error estimate) on a
/// finite interval: the interval with the largest error estimate is bisected
/// until the summed estimate drops below abs_tol. Throws NumericError if max_subdivisions
/// intervals are not enough or the integrand returns a non-finite value.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureConfig& cfg = {});

}  // namespace rfamado
