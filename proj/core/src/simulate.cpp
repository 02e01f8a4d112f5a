#include "rfamado/simulate.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

#include "rfamado/error.hpp"

namespace rfamado {

double log_positive_stable(double alpha, SplitMix64& rng) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("stable index must lie in (0, 1]");
  const double u = std::numbers::pi * rng.uniform_open();
  const double e = rng.exponential();
  if (alpha == 1.0) return 0.0;
  return std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
         (1.0 - alpha) / alpha * (std::log(std::sin((1.0 - alpha) * u)) - std::log(e));
}

namespace {

// Y = sigma * (-log U)^(-xi) with -log U = (E / S)^alpha.
double frechet_from_frailty(const GevMargin& m, double alpha, double log_s, double e) {
  return m.sigma * std::exp(-m.xi * alpha * (std::log(e) - log_s));
}

}  // namespace

BivariateSample sample_bivariate_logistic(const BivariateGevSpec& spec, std::size_t n,
                                          std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw DomainError("sample size must be >= 1");
  SplitMix64 rng(seed);
  BivariateSample out;
  out.y1.resize(n);
  out.y2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double log_s = log_positive_stable(spec.alpha, rng);
    const double e1 = rng.exponential();
    const double e2 = rng.exponential();
    out.y1[i] = frechet_from_frailty(spec.m1, spec.alpha, log_s, e1);
    out.y2[i] = frechet_from_frailty(spec.m2, spec.alpha, log_s, e2);
  }
  return out;
}

void SimGridSpec::validate() const {
  if (years < 1) throw DomainError("simulation needs at least one year");
  std::unordered_set<std::string> ids, cluster_ids;
  for (const auto& c : clusters) {
    if (!cluster_ids.insert(c.cluster_id).second)
      throw DomainError("duplicate cluster id '" + c.cluster_id + "'");
    if (!(c.alpha > 0.0 && c.alpha <= 1.0))
      throw DomainError("cluster '" + c.cluster_id + "': alpha must lie in (0, 1]");
    c.margin.validate();
    for (const auto& p : c.points) {
      if (!ids.insert(p.point_id).second)
        throw DomainError("point '" + p.point_id + "' appears in more than one cluster");
      if (!(p.scale > 0.0)) throw DomainError("point '" + p.point_id + "': scale must be positive");
    }
  }
}

std::size_t SimGridSpec::point_count() const noexcept {
  std::size_t p = 0;
  for (const auto& c : clusters) p += c.points.size();
  return p;
}

Dataset sample_grid(const SimGridSpec& spec, std::uint64_t seed, std::string label) {
  spec.validate();
  std::vector<int> years(spec.years);
  for (std::size_t t = 0; t < spec.years; ++t) years[t] = spec.first_year + static_cast<int>(t);

  std::vector<GridSeries> points;
  points.reserve(spec.point_count());
  for (const auto& cluster : spec.clusters) {
    SplitMix64 frailty_rng(derive_seed(seed, "cluster:" + cluster.cluster_id));
    std::vector<double> log_s(spec.years);
    for (auto& v : log_s) v = log_positive_stable(cluster.alpha, frailty_rng);

    for (const auto& p : cluster.points) {
      SplitMix64 rng(derive_seed(seed, p.point_id));
      GridSeries s;
      s.point_id = p.point_id;
      s.lat = p.lat;
      s.lon = p.lon;
      s.years = years;
      s.values.resize(spec.years);
      const GevMargin m{cluster.margin.sigma * p.scale, cluster.margin.xi};
      for (std::size_t t = 0; t < spec.years; ++t)
        s.values[t] = frechet_from_frailty(m, cluster.alpha, log_s[t], rng.exponential());
      points.push_back(std::move(s));
    }
  }
  return Dataset(std::move(label), std::move(points));
}

}  // namespace rfamado
