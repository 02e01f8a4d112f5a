#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rfamado {

/// Denominator of the empirical CDF. `n` gives (1/n)#{x_i <= x}; the
/// `n_plus_one` variant divides by n + 1 instead.
enum class EcdfDenominator { n, n_plus_one };

/// Step-function empirical CDF over a fixed sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::span<const double> sample,
                        EcdfDenominator denom = EcdfDenominator::n);

  /// #{i : x_i <= x}
  std::size_t count_le(double x) const noexcept;
  double operator()(double x) const noexcept;

  std::span<const double> sorted_values() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
  double scale_;
};

/// Classical F-madogram (1/2n) sum |F1(y1_i) - F2(y2_i)| with empirical
/// margins, pairing by index. Always in [0, 1/2].
double fmadogram(std::span<const double> y1, std::span<const double> y2,
                 EcdfDenominator denom = EcdfDenominator::n);

/// RFA-madogram estimate at scale c:
///   D(c) = (1/2n) sum_i |F2(c y1_i) - F1(y2_i / c)|.
/// F1(y2_i / c) is evaluated as #{j : c y1_j <= y2_i} / n so that both terms
/// compare the same rescaled sample c*y1 against y2; this makes D(lambda) == 0
/// exactly whenever y2 == lambda * y1 in floating point.
double rfa_madogram_at(std::span<const double> y1, std::span<const double> y2, double c,
                       EcdfDenominator denom = EcdfDenominator::n);

/// Integer form of the triangle-inequality bound 2|d - D(c)| <= E[Delta1] +
/// E[Delta2], with every expectation an empirical mean. All sums are exact
/// counts scaled by 1/(n * denom).
struct MadogramBoundTerms {
  double d_fmad;        ///< d
  double d_rfa;         ///< D(c)
  double mean_delta_y1; ///< mean_i |F2(c y1_i) - F1(y1_i)|
  double mean_delta_y2; ///< mean_i |F2(y2_i) - F1(y2_i / c)|
  std::int64_t twice_gap_count;   ///< n*denom * 2|d - D|
  std::int64_t delta_sum_count;   ///< n*denom * (mean_delta_y1 + mean_delta_y2)
};
MadogramBoundTerms madogram_bound_terms(std::span<const double> y1, std::span<const double> y2,
                                        double c, EcdfDenominator denom = EcdfDenominator::n);

struct CStarConfig {
  double c_min = 0.1;
  double c_max = 10.0;
  int grid_points = 129;   ///< log-spaced
  int refine_rounds = 3;   ///< local step halvings around the incumbent
  bool prescale = true;    ///< divide each series by its mean first (matrix level)
  EcdfDenominator ecdf = EcdfDenominator::n;

  /// Throws DomainError on c_min >= c_max, c_min <= 0, grid_points < 3 or
  /// refine_rounds < 0.
  void validate() const;
  /// True when c_min * c_max == 1 (to 1e-12 in log space); the grid is then
  /// built as exact multiples of the step so that t and -t are both nodes.
  bool inversion_symmetric() const noexcept;
};

/// Log-scale nodes log(c) of the search grid.
std::vector<double> log_c_grid(const CStarConfig& cfg);

struct CStarResult {
  double c_star = 1.0;
  double d_rfa = 0.0;
  bool boundary = false;  ///< grid argmin sat on the first or last node
};

/// Grid argmin of rfa_madogram_at over log_c_grid(cfg), then
/// cfg.refine_rounds rounds of step halving around the incumbent. Ties go to
/// the smallest |log c|, then to the smaller c.
CStarResult optimal_c(std::span<const double> y1, std::span<const double> y2,
                      const CStarConfig& cfg = {});

/// One series prepared for repeated RFA-madogram evaluation: values sorted
/// ascending plus the sorted position of every original index.
struct SortedSeries {
  std::vector<double> sorted;
  std::vector<std::uint32_t> position;

  explicit SortedSeries(std::span<const double> values);
  std::size_t size() const noexcept { return sorted.size(); }
  bool degenerate() const noexcept { return !sorted.empty() && sorted.front() == sorted.back(); }
};

/// Evaluates D(c) for a fixed pair in O(n) per call with reusable scratch.
/// Not thread-safe; use one per worker.
class RfaPairEvaluator {
 public:
  RfaPairEvaluator() = default;

  /// Sum over i of |#{j : y2_j <= c y1_i} - #{j : c y1_j <= y2_i}|.
  std::int64_t abs_count_sum(const SortedSeries& s1, const SortedSeries& s2, double c);
  double evaluate(const SortedSeries& s1, const SortedSeries& s2, double c,
                  EcdfDenominator denom = EcdfDenominator::n);
  CStarResult optimal_c(const SortedSeries& s1, const SortedSeries& s2, const CStarConfig& cfg,
                        std::span<const double> log_grid);

 private:
  std::vector<std::uint32_t> below1_;
  std::vector<std::uint32_t> below2_;
};

/// F-madogram on prepared series.
double fmadogram(const SortedSeries& s1, const SortedSeries& s2,
                 EcdfDenominator denom = EcdfDenominator::n);

}  // namespace rfamado
