#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfamado/cluster.hpp"

namespace rfamado {

inline constexpr std::size_t kMaxAlignmentClusters = 8;

struct Alignment {
  Partition relabeled;
  /// permutation[target_label] = label in the reference numbering.
  std::vector<int> permutation;
  std::size_t disagreement = 0;  ///< points whose labels still differ
};

/// Relabels `target` to minimise the Hamming disagreement with `reference`
/// by exhaustive search over all k! permutations (k <= 8), visited in
/// lexicographic order so the first minimiser wins ties. The relabeled
/// partition keeps the target's grouping and reorders its medoids.
Alignment align_partitions(const Partition& reference, const Partition& target);

/// Cycle notation, 1-based, of the map reference label -> target label
/// implied by an alignment; e.g. "(1 3 2)". Fixed points are omitted and
/// the identity prints "()".
std::string reference_to_target_cycles(std::span<const int> permutation);

struct CentralPartition {
  std::vector<std::string> point_ids;
  std::vector<int> modal_cluster;
  std::vector<double> probability;          ///< modal count / m
  std::vector<std::uint8_t> tie;            ///< 1 when several clusters share the modal count
  std::vector<double> membership;           ///< p x k fractions, row-major; empty if unknown
  std::vector<Partition> aligned;           ///< inputs after relabeling
  std::size_t k = 0;
  std::size_t models = 0;

  std::size_t size() const noexcept { return modal_cluster.size(); }
};

/// Aligns every partition and takes the per-point mode (lowest cluster id
/// on ties). Without a reference, the first partition seeds a running
/// consensus (majority vote over partitions aligned so far) and each later
/// partition is aligned to it, so input order matters. With a reference,
/// every partition is aligned to that fixed labelling instead.
CentralPartition central_partition(std::span<const Partition> parts,
                                   const std::optional<std::vector<int>>& reference = std::nullopt);

struct ClusterChange {
  std::size_t gained = 0;  ///< points whose modal cluster becomes this one
  std::size_t lost = 0;    ///< points whose modal cluster leaves this one
  double mean_probability_delta = 0.0;
};

struct ComparisonReport {
  std::vector<std::string> point_ids;
  std::vector<std::uint8_t> changed;
  std::vector<int> permutation;              ///< applied to the second partition's labels
  /// Per point and cluster: m_b(c) - m_a(c), with m(c) = probability when
  /// the modal cluster is c and 0 otherwise. p x k, row-major.
  std::vector<double> probability_delta;
  std::vector<ClusterChange> clusters;
  std::size_t k = 0;

  std::size_t changed_count() const noexcept;
};

/// Aligns `factual` to the modal labels of `counterfactual` and flags every
/// point whose modal cluster differs.
ComparisonReport compare_central(const CentralPartition& counterfactual,
                                 const CentralPartition& factual);

/// CSV with header `point_id,modal_cluster,probability,tie_flag`.
void write_central_csv(std::ostream& out, const CentralPartition& c);
void save_central(const std::filesystem::path& path, const CentralPartition& c);
/// Restores modal clusters and probabilities; membership stays empty.
CentralPartition read_central_csv(std::istream& in);
CentralPartition load_central(const std::filesystem::path& path);

/// CSV with header `point_id,changed`.
void write_changes_csv(std::ostream& out, const ComparisonReport& r);

inline constexpr const char* kCentralCsvHeader = "point_id,modal_cluster,probability,tie_flag";

}  // namespace rfamado
