#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rfamado/dataset.hpp"
#include "rfamado/dissimilarity.hpp"
#include "rfamado/madogram.hpp"

namespace rfamado {

struct Partition {
  std::vector<int> labels;            ///< cluster id in [0, k) per point
  std::vector<std::size_t> medoids;   ///< medoids[c] is the medoid of cluster c
  double total_cost = 0.0;            ///< sum_i D(i, medoids[labels[i]])
  std::size_t k = 0;
  std::vector<std::string> point_ids; ///< optional; empty means positional
  std::vector<double> cost_trace;     ///< cost after BUILD and after every accepted swap

  std::size_t size() const noexcept { return labels.size(); }
};

/// Throws DomainError unless D is square, symmetric, nonnegative, finite and
/// has a zero diagonal. The triangle inequality is not required.
void validate_dissimilarity(const SquareMatrix& D);

/// Classic PAM. BUILD adds, one at a time, the point that most lowers the
/// total cost; SWAP then repeatedly applies the best cost-reducing
/// (medoid, non-medoid) exchange until none lowers the cost. Ties go to the
/// lowest (medoid slot, candidate index). Candidate evaluation is split over
/// `threads` workers; the reduction is order independent.
Partition pam(const SquareMatrix& D, std::size_t k, unsigned threads = 1);
Partition pam(const DissimilarityMatrix& D, std::size_t k, unsigned threads = 1);

/// Sum of D(i, medoids[labels[i]]) accumulated in index order.
double partition_cost(const SquareMatrix& D, const Partition& part);

/// Mean silhouette (b - a) / max(a, b). Singletons and points with
/// a = b = 0 contribute 0. Requires k >= 2.
double silhouette(const SquareMatrix& D, const Partition& part);

/// CSV with header `point_id,cluster,is_medoid`.
void write_partition_csv(std::ostream& out, const Partition& part);
void save_partition(const std::filesystem::path& path, const Partition& part);
/// k is taken as max(cluster) + 1; medoids come from is_medoid rows.
Partition read_partition_csv(std::istream& in);
Partition load_partition(const std::filesystem::path& path);

inline constexpr const char* kPartitionCsvHeader = "point_id,cluster,is_medoid";

struct AblationReport {
  Partition original;
  Partition shuffled;
  std::vector<std::string> point_ids;
  std::vector<double> d_original;  ///< D(i, own medoid) on the original data
  std::vector<double> d_shuffled;  ///< same on the time-shuffled data
  double fraction_original_lower = 0.0;
};

/// Dissimilarity + PAM on `d` and on shuffle_in_time(d, seed); compares each
/// point's dissimilarity to its own medoid across the two runs.
AblationReport shuffle_ablation(const Dataset& d, std::size_t k, std::uint64_t seed,
                                const CStarConfig& cfg = {}, unsigned threads = 1);

/// CSV with header `point_id,d_original,d_shuffled,original_lower`.
void write_ablation_csv(std::ostream& out, const AblationReport& r);

}  // namespace rfamado
