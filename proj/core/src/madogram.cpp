#include "rfamado/madogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "rfamado/error.hpp"

namespace rfamado {

namespace {

double denominator(std::size_t n, EcdfDenominator denom) {
  return static_cast<double>(denom == EcdfDenominator::n ? n : n + 1);
}

void check_pair(std::span<const double> y1, std::span<const double> y2) {
  if (y1.size() != y2.size())
    throw DomainError("series length mismatch: " + std::to_string(y1.size()) + " vs " +
                      std::to_string(y2.size()));
  if (y1.size() < 2) throw DomainError("series need at least 2 values");
}

void check_c(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scale c must be positive and finite");
}

// #{j : x_j <= x_i} for every sorted position i.
std::vector<std::uint32_t> rank_max(const SortedSeries& s) {
  const auto n = s.size();
  std::vector<std::uint32_t> r(n);
  for (std::size_t k = n; k-- > 0;)
    r[k] = (k + 1 < n && s.sorted[k] == s.sorted[k + 1]) ? r[k + 1]
                                                          : static_cast<std::uint32_t>(k + 1);
  return r;
}

struct Candidate {
  double t;
  std::int64_t count;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.count != b.count) return a.count < b.count;
  const double fa = std::abs(a.t), fb = std::abs(b.t);
  if (fa != fb) return fa < fb;
  return a.t < b.t;
}

}  // namespace

EmpiricalCdf::EmpiricalCdf(std::span<const double> sample, EcdfDenominator denom)
    : sorted_(sample.begin(), sample.end()) {
  if (sorted_.empty()) throw DomainError("empirical CDF of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
  scale_ = 1.0 / denominator(sorted_.size(), denom);
}

std::size_t EmpiricalCdf::count_le(double x) const noexcept {
  return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), x) -
                                  sorted_.begin());
}

double EmpiricalCdf::operator()(double x) const noexcept {
  return static_cast<double>(count_le(x)) * scale_;
}

SortedSeries::SortedSeries(std::span<const double> values) : sorted(values.size()), position(values.size()) {
  std::vector<std::uint32_t> order(values.size());
  std::iota(order.begin(), order.end(), 0U);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted[k] = values[order[k]];
    position[order[k]] = static_cast<std::uint32_t>(k);
  }
}

std::int64_t RfaPairEvaluator::abs_count_sum(const SortedSeries& s1, const SortedSeries& s2,
                                             double c) {
  const std::size_t n = s1.size();
  const double* a = s1.sorted.data();
  const double* b = s2.sorted.data();
  below1_.resize(n);
  below2_.resize(n);

  std::size_t j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = c * a[k];
    while (j < n && b[j] <= x) ++j;
    below1_[k] = static_cast<std::uint32_t>(j);
  }
  j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    while (j < n && c * a[j] <= b[k]) ++j;
    below2_[k] = static_cast<std::uint32_t>(j);
  }

  std::int64_t sum = 0;
  const auto* p1 = s1.position.data();
  const auto* p2 = s2.position.data();
  for (std::size_t i = 0; i < n; ++i) {
    const auto diff = static_cast<std::int64_t>(below1_[p1[i]]) - static_cast<std::int64_t>(below2_[p2[i]]);
    sum += diff < 0 ? -diff : diff;
  }
  return sum;
}

double RfaPairEvaluator::evaluate(const SortedSeries& s1, const SortedSeries& s2, double c,
                                  EcdfDenominator denom) {
  const auto n = s1.size();
  return static_cast<double>(abs_count_sum(s1, s2, c)) /
         (2.0 * static_cast<double>(n) * denominator(n, denom));
}

CStarResult RfaPairEvaluator::optimal_c(const SortedSeries& s1, const SortedSeries& s2,
                                        const CStarConfig& cfg, std::span<const double> log_grid) {
  const std::size_t K = log_grid.size();
  Candidate best{log_grid[0], abs_count_sum(s1, s2, std::exp(log_grid[0]))};
  std::size_t best_k = 0;
  for (std::size_t k = 1; k < K; ++k) {
    const Candidate cand{log_grid[k], abs_count_sum(s1, s2, std::exp(log_grid[k]))};
    if (better(cand, best)) {
      best = cand;
      best_k = k;
    }
  }

  CStarResult result;
  result.boundary = best_k == 0 || best_k == K - 1;

  const double t_lo = log_grid.front();
  const double t_hi = log_grid.back();
  double step = (t_hi - t_lo) / static_cast<double>(K - 1);
  for (int round = 0; round < cfg.refine_rounds; ++round) {
    step *= 0.5;
    const double centre = best.t;
    for (const double t : {centre - step, centre + step}) {
      if (t < t_lo || t > t_hi) continue;
      const Candidate cand{t, abs_count_sum(s1, s2, std::exp(t))};
      if (better(cand, best)) best = cand;
    }
  }

  const auto n = s1.size();
  result.c_star = std::exp(best.t);
  result.d_rfa = static_cast<double>(best.count) /
                 (2.0 * static_cast<double>(n) * denominator(n, cfg.ecdf));
  return result;
}

double fmadogram(const SortedSeries& s1, const SortedSeries& s2, EcdfDenominator denom) {
  const auto n = s1.size();
  const auto r1 = rank_max(s1);
  const auto r2 = rank_max(s2);
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < n; ++i)
    sum += std::abs(static_cast<std::int64_t>(r1[s1.position[i]]) -
                    static_cast<std::int64_t>(r2[s2.position[i]]));
  return static_cast<double>(sum) / (2.0 * static_cast<double>(n) * denominator(n, denom));
}

double fmadogram(std::span<const double> y1, std::span<const double> y2, EcdfDenominator denom) {
  check_pair(y1, y2);
  return fmadogram(SortedSeries(y1), SortedSeries(y2), denom);
}

double rfa_madogram_at(std::span<const double> y1, std::span<const double> y2, double c,
                       EcdfDenominator denom) {
  check_pair(y1, y2);
  check_c(c);
  RfaPairEvaluator eval;
  return eval.evaluate(SortedSeries(y1), SortedSeries(y2), c, denom);
}

MadogramBoundTerms madogram_bound_terms(std::span<const double> y1, std::span<const double> y2,
                                        double c, EcdfDenominator denom) {
  check_pair(y1, y2);
  check_c(c);
  const SortedSeries s1(y1), s2(y2);
  const auto n = s1.size();
  const auto r1 = rank_max(s1);
  const auto r2 = rank_max(s2);

  // A_i = #{y2 <= c y1_i}, B_i = #{c y1 <= y2_i}: the same counts as D(c).
  std::vector<std::int64_t> A(n), B(n);
  {
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = c * s1.sorted[k];
      while (j < n && s2.sorted[j] <= x) ++j;
      A[k] = static_cast<std::int64_t>(j);
    }
    j = 0;
    for (std::size_t k = 0; k < n; ++k) {
      while (j < n && c * s1.sorted[j] <= s2.sorted[k]) ++j;
      B[k] = static_cast<std::int64_t>(j);
    }
  }

  std::int64_t s_d = 0, s_D = 0, s_delta1 = 0, s_delta2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k1 = s1.position[i], k2 = s2.position[i];
    const std::int64_t f1y1 = r1[k1], f2y2 = r2[k2];
    const std::int64_t f2cy1 = A[k1], f1y2c = B[k2];
    s_d += std::abs(f1y1 - f2y2);
    s_D += std::abs(f2cy1 - f1y2c);
    s_delta1 += std::abs(f2cy1 - f1y1);
    s_delta2 += std::abs(f2y2 - f1y2c);
  }

  const double unit = static_cast<double>(n) * denominator(n, denom);
  MadogramBoundTerms out;
  out.d_fmad = static_cast<double>(s_d) / (2.0 * unit);
  out.d_rfa = static_cast<double>(s_D) / (2.0 * unit);
  out.mean_delta_y1 = static_cast<double>(s_delta1) / unit;
  out.mean_delta_y2 = static_cast<double>(s_delta2) / unit;
  out.twice_gap_count = std::abs(s_d - s_D);
  out.delta_sum_count = s_delta1 + s_delta2;
  return out;
}

void CStarConfig::validate() const {
  if (!(c_min > 0.0) || !std::isfinite(c_min)) throw DomainError("c_min must be positive");
  if (!(c_max > c_min) || !std::isfinite(c_max)) throw DomainError("c_min must be < c_max");
  if (grid_points < 3) throw DomainError("grid_points must be >= 3");
  if (refine_rounds < 0) throw DomainError("refine_rounds must be >= 0");
}

bool CStarConfig::inversion_symmetric() const noexcept {
  return std::abs(std::log(c_min) + std::log(c_max)) <= 1e-12;
}

std::vector<double> log_c_grid(const CStarConfig& cfg) {
  cfg.validate();
  const auto K = static_cast<std::size_t>(cfg.grid_points);
  const double lo = std::log(cfg.c_min), hi = std::log(cfg.c_max);
  const double step = (hi - lo) / static_cast<double>(K - 1);
  std::vector<double> grid(K);
  if (cfg.inversion_symmetric()) {
    // Nodes are (k - m) * step around zero; with K odd, c = 1 is a node.
    const double m = static_cast<double>(K - 1) / 2.0;
    for (std::size_t k = 0; k < K; ++k) grid[k] = (static_cast<double>(k) - m) * step;
  } else {
    for (std::size_t k = 0; k < K; ++k) grid[k] = lo + static_cast<double>(k) * step;
    grid.back() = hi;
  }
  return grid;
}

CStarResult optimal_c(std::span<const double> y1, std::span<const double> y2,
                      const CStarConfig& cfg) {
  check_pair(y1, y2);
  const auto grid = log_c_grid(cfg);
  RfaPairEvaluator eval;
  return eval.optimal_c(SortedSeries(y1), SortedSeries(y2), cfg, grid);
}

}  // namespace rfamado
