#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfamado/dataset.hpp"
#include "rfamado/gev_theory.hpp"
#include "rfamado/random.hpp"

namespace rfamado {

/// log S for a positive stable variate with Laplace transform
/// E exp(-s S) = exp(-s^alpha), alpha in (0, 1], via Kanter's representation
///   S = sin(alpha U) / sin(U)^(1/alpha) * (sin((1 - alpha) U) / E)^((1 - alpha)/alpha)
/// with U ~ Uniform(0, pi), E ~ Exp(1). alpha = 1 gives S = 1. Returned on
/// the log scale because S overflows for small alpha.
double log_positive_stable(double alpha, SplitMix64& rng);

struct BivariateSample {
  std::vector<double> y1;
  std::vector<double> y2;
};

/// n iid pairs from the bivariate logistic max-stable law with GEV margins.
/// Uses the Marshall-Olkin frailty construction of the Gumbel copula
/// (dependence 1/alpha): U_i = exp(-(E_i / S)^alpha), then Y_i = F_i^{-1}(U_i).
BivariateSample sample_bivariate_logistic(const BivariateGevSpec& spec, std::size_t n,
                                          std::uint64_t seed);

struct SimPoint {
  std::string point_id;
  double lat = 0.0;
  double lon = 0.0;
  double scale = 1.0;  ///< multiplier lambda on the cluster margin
};

struct SimCluster {
  std::string cluster_id;
  double alpha = 1.0;       ///< exchangeable logistic dependence within the cluster
  GevMargin margin;
  std::vector<SimPoint> points;
};

/// Clusters are mutually independent; inside a cluster every year shares
/// one stable frailty, so any two members follow the bivariate logistic law
/// with the cluster's alpha and margins that differ only by `scale`.
struct SimGridSpec {
  std::size_t years = 0;
  int first_year = 1;
  std::vector<SimCluster> clusters;

  void validate() const;
  std::size_t point_count() const noexcept;
};

/// Draws the grid dataset. Cluster frailties use derive_seed(seed,
/// "cluster:" + cluster_id) and point exponentials use derive_seed(seed,
/// point_id), so output does not depend on generation order. Points appear
/// cluster by cluster in spec order.
Dataset sample_grid(const SimGridSpec& spec, std::uint64_t seed, std::string label = "simulated");

}  // namespace rfamado
