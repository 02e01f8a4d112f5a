#include "rfamado/gev_theory.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "rfamado/error.hpp"
#include "rfamado/parallel.hpp"

namespace rfamado {

namespace {

// 1 / (1 + exp(-x)), stable for large |x|.
double logistic(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("logistic alpha must lie in (0, 1]");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// E h(log T) for T ~ Exp(1), integrated over x = log T with density
// exp(x - e^x). The lower tail is cut where the density is below 1e-17 of
// its scale, the upper tail at e^-90.
double expect_log_exp(const std::function<double(double)>& h, double feature,
                      const QuadratureConfig& quad) {
  constexpr double kUpper = 4.5;
  const double lower = std::min(feature, 0.0) - 40.0;
  std::vector<double> cuts{lower, 0.0, kUpper};
  if (feature > lower && feature < kUpper && feature != 0.0) cuts.push_back(feature);
  std::sort(cuts.begin(), cuts.end());
  auto f = [&](double x) { return h(x) * std::exp(x - std::exp(x)); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate(f, cuts[i], cuts[i + 1], quad).value;
  return total;
}

}  // namespace

void GevMargin::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("GEV scale sigma must be positive");
  if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("GEV shape xi must be positive");
}

double GevMargin::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  return std::exp(-std::exp(-std::log(x / sigma) / xi));
}

double GevMargin::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  return sigma * std::exp(-xi * std::log(-std::log(u)));
}

void BivariateGevSpec::validate() const {
  m1.validate();
  m2.validate();
  check_alpha(alpha);
}

double BivariateGevSpec::joint_cdf(double x, double y) const {
  const double f1 = m1.cdf(x), f2 = m2.cdf(y);
  if (f1 <= 0.0 || f2 <= 0.0) return 0.0;
  // z_i = -1 / log F_i, so log z_i = -log(-log F_i).
  const double lz1 = -std::log(-std::log(f1));
  const double lz2 = -std::log(-std::log(f2));
  return std::exp(-std::exp(log_logistic_V(lz1, lz2, alpha)));
}

double log_logistic_V(double log_x, double log_y, double alpha) noexcept {
  const double p = -log_x / alpha, q = -log_y / alpha;
  const double hi = std::max(p, q), lo = std::min(p, q);
  return alpha * (hi + std::log1p(std::exp(lo - hi)));
}

double logistic_V(double x, double y, double alpha) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("logistic V needs x, y > 0");
  check_alpha(alpha);
  return std::exp(log_logistic_V(std::log(x), std::log(y), alpha));
}

double extremal_coefficient(double alpha) {
  check_alpha(alpha);
  return std::exp2(alpha);
}

double extremal_coefficient_from_d(double d) {
  if (!(d >= 0.0 && d < 0.5)) throw DomainError("madogram value must lie in [0, 1/2)");
  return (1.0 + 2.0 * d) / (1.0 - 2.0 * d);
}

double theoretical_D_homogeneous(const BivariateGevSpec& spec, double c) {
  spec.validate();
  if (spec.m1.xi != spec.m2.xi) throw DomainError("closed form needs xi1 == xi2");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scale c must be positive");
  const double xi = spec.m1.xi;
  const double log_a12 = -std::log(c * spec.m1.sigma / spec.m2.sigma) / xi;
  const double log_theta = log_logistic_V(log_a12, -log_a12, spec.alpha);
  // theta/(theta+1) = logistic(log theta); 1/(1+a) = logistic(-log a).
  return logistic(log_theta) - 0.5 * logistic(-log_a12) - 0.5 * logistic(log_a12);
}

double theoretical_D_general(const BivariateGevSpec& spec, double c, const QuadratureConfig& quad) {
  spec.validate();
  quad.validate();
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scale c must be positive");
  const double xi1 = spec.m1.xi, xi2 = spec.m2.xi;
  const double r = xi2 / xi1;
  const double log_a12 = -std::log(c * spec.m1.sigma / spec.m2.sigma) / xi2;
  const double log_a21 = -std::log(spec.m2.sigma / (c * spec.m1.sigma)) / xi1;
  const double alpha = spec.alpha;

  // All three terms are expectations over T ~ Exp(1), written in x = log T.
  // The integrands switch from 1 to 0 (or back) near a known x, which can sit
  // far out in either tail, so that point is passed as a breakpoint.
  const double xa = -r * log_a12;
  const double xb = -log_a21 / r;
  const double xc = std::min(log_a12, log_a21);

  // E max(F2(cY1), F1(Y2/c)) = E P(max > U) with -log U = T.
  const double e_max = expect_log_exp(
      [&](double x) {
        const double lz1 = r * (log_a12 - x);
        const double lz2 = (log_a21 - x) / r;
        return -std::expm1(-std::exp(log_logistic_V(lz1, lz2, alpha)));
      },
      xc, quad);
  // E exp(-a12 T^(1/r)) and E exp(-a21 T^r).
  const double e1 = expect_log_exp([&](double x) { return std::exp(-std::exp(log_a12 + x / r)); },
                                   xa, quad);
  const double e2 = expect_log_exp([&](double x) { return std::exp(-std::exp(log_a21 + r * x)); },
                                   xb, quad);
  return e_max - 0.5 * e1 - 0.5 * e2;
}

TheoreticalOptimum minimize_theoretical_D(const BivariateGevSpec& spec,
                                          const QuadratureConfig& quad) {
  spec.validate();
  const double centre = std::log(spec.m2.sigma / spec.m1.sigma);
  const double unit = 0.5 * std::min(spec.m1.xi, spec.m2.xi);
  auto objective = [&](double t) { return theoretical_D_general(spec, std::exp(t), quad); };

  constexpr int kHalfWidth = 40;
  int best = 0;
  double best_value = objective(centre);
  for (int k = 1; k <= kHalfWidth; ++k) {
    for (const int s : {-k, k}) {
      const double v = objective(centre + s * unit);
      if (v < best_value) {
        best_value = v;
        best = s;
      }
    }
  }
  const double lo = centre + (best - 1) * unit;
  const double hi = centre + (best + 1) * unit;
  const auto [t, v] = boost::math::tools::brent_find_minima(objective, lo, hi, 40);
  if (v < best_value) return {std::exp(t), v};
  return {std::exp(centre + best * unit), best_value};
}

std::vector<SurfaceCell> optimal_dissimilarity_surface(std::span<const double> alphas,
                                                       std::span<const double> ratios, double xi2,
                                                       const QuadratureConfig& quad,
                                                       unsigned threads) {
  if (alphas.empty() || ratios.empty()) throw DomainError("surface grids must be nonempty");
  if (!(xi2 > 0.0)) throw DomainError("xi2 must be positive");
  for (const double a : alphas) check_alpha(a);
  for (const double q : ratios)
    if (!(q > 0.0)) throw DomainError("shape ratios must be positive");

  std::vector<SurfaceCell> cells(alphas.size() * ratios.size());
  parallel_for(cells.size(), resolve_threads(threads), [&](std::size_t idx, unsigned) {
    const double alpha = alphas[idx / ratios.size()];
    const double ratio = ratios[idx % ratios.size()];
    BivariateGevSpec spec{{1.0, ratio * xi2}, {1.0, xi2}, alpha};
    const auto opt = minimize_theoretical_D(spec, quad);
    cells[idx] = {alpha, ratio, opt.c_star, opt.d_star};
  });
  return cells;
}

void write_surface_csv(std::ostream& out, const std::vector<SurfaceCell>& cells) {
  out << "alpha,ratio,d_star,c_star\n";
  for (const auto& c : cells)
    out << format_double(c.alpha) << ',' << format_double(c.ratio) << ','
        << format_double(c.d_star) << ',' << format_double(c.c_star) << '\n';
}

}  // namespace rfamado
