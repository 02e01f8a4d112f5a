#include "rfamado/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string_view>
#include <unordered_set>

#include "rfamado/error.hpp"

namespace rfamado {

namespace {

void check_same_points(const Partition& a, const Partition& b) {
  if (a.size() != b.size())
    throw DataError("partitions cover different point counts: " + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()));
  if (!a.point_ids.empty() && !b.point_ids.empty() && a.point_ids != b.point_ids)
    throw DataError("partitions cover different point sets");
}

void check_labels(const Partition& part, std::size_t k) {
  for (const int l : part.labels)
    if (l < 0 || static_cast<std::size_t>(l) >= k)
      throw DataError("label " + std::to_string(l) + " outside [0, " + std::to_string(k) + ")");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

Partition labels_only(std::vector<int> labels, std::size_t k) {
  Partition p;
  p.labels = std::move(labels);
  p.k = k;
  return p;
}

}  // namespace

Alignment align_partitions(const Partition& reference, const Partition& target) {
  check_same_points(reference, target);
  if (reference.k != target.k)
    throw DataError("partitions have different k: " + std::to_string(reference.k) + " vs " +
                    std::to_string(target.k));
  const std::size_t k = target.k;
  if (k > kMaxAlignmentClusters)
    throw DomainError("alignment is exhaustive and limited to k <= " +
                      std::to_string(kMaxAlignmentClusters));
  check_labels(reference, k);
  check_labels(target, k);

  // confusion[t * k + r]: points labelled t by the target and r by the reference.
  std::vector<std::size_t> confusion(k * k, 0);
  for (std::size_t i = 0; i < target.size(); ++i)
    ++confusion[static_cast<std::size_t>(target.labels[i]) * k +
                static_cast<std::size_t>(reference.labels[i])];

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  std::size_t best_agree = 0;
  bool first = true;
  do {
    std::size_t agree = 0;
    for (std::size_t t = 0; t < k; ++t) agree += confusion[t * k + static_cast<std::size_t>(perm[t])];
    if (first || agree > best_agree) {
      best_agree = agree;
      best = perm;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Alignment out;
  out.permutation = best;
  out.disagreement = target.size() - best_agree;
  out.relabeled = target;
  for (auto& l : out.relabeled.labels) l = best[static_cast<std::size_t>(l)];
  if (!target.medoids.empty()) {
    for (std::size_t t = 0; t < k; ++t)
      out.relabeled.medoids[static_cast<std::size_t>(best[t])] = target.medoids[t];
  }
  return out;
}

std::string reference_to_target_cycles(std::span<const int> permutation) {
  const std::size_t k = permutation.size();
  std::vector<std::size_t> inverse(k);
  for (std::size_t t = 0; t < k; ++t) inverse[static_cast<std::size_t>(permutation[t])] = t;
  std::vector<bool> seen(k, false);
  std::string out;
  for (std::size_t start = 0; start < k; ++start) {
    if (seen[start] || inverse[start] == start) continue;
    out += '(';
    std::size_t cur = start;
    bool lead = true;
    while (!seen[cur]) {
      seen[cur] = true;
      if (!lead) out += ' ';
      out += std::to_string(cur + 1);
      lead = false;
      cur = inverse[cur];
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

CentralPartition central_partition(std::span<const Partition> parts,
                                   const std::optional<std::vector<int>>& reference) {
  if (parts.empty()) throw DataError("central partition needs at least one partition");
  const auto& first = parts.front();
  const std::size_t p = first.size();
  const std::size_t k = first.k;
  for (const auto& part : parts) {
    check_same_points(first, part);
    if (part.k != k) throw DataError("all partitions must share the same k");
    check_labels(part, k);
  }

  CentralPartition c;
  c.k = k;
  c.models = parts.size();
  c.point_ids = first.point_ids;
  if (c.point_ids.empty())
    for (std::size_t i = 0; i < p; ++i) c.point_ids.push_back(std::to_string(i));

  std::vector<std::size_t> tally(p * k, 0);
  auto add = [&](const Partition& aligned) {
    for (std::size_t i = 0; i < p; ++i) ++tally[i * k + static_cast<std::size_t>(aligned.labels[i])];
    c.aligned.push_back(aligned);
  };
  auto mode = [&]() {
    std::vector<int> labels(p);
    for (std::size_t i = 0; i < p; ++i) {
      const auto row = tally.begin() + static_cast<std::ptrdiff_t>(i * k);
      labels[i] = static_cast<int>(std::max_element(row, row + static_cast<std::ptrdiff_t>(k)) - row);
    }
    return labels;
  };

  if (reference) {
    if (reference->size() != p) throw DataError("reference labelling has the wrong length");
    const auto ref = labels_only(*reference, k);
    check_labels(ref, k);
    for (const auto& part : parts) add(align_partitions(ref, part).relabeled);
  } else {
    add(first);
    for (std::size_t m = 1; m < parts.size(); ++m) {
      const auto consensus = labels_only(mode(), k);
      add(align_partitions(consensus, parts[m]).relabeled);
    }
  }

  const double models = static_cast<double>(parts.size());
  c.modal_cluster = mode();
  c.probability.resize(p);
  c.tie.resize(p);
  c.membership.resize(p * k);
  for (std::size_t i = 0; i < p; ++i) {
    const auto top = tally[i * k + static_cast<std::size_t>(c.modal_cluster[i])];
    c.probability[i] = static_cast<double>(top) / models;
    std::size_t holders = 0;
    for (std::size_t j = 0; j < k; ++j) {
      c.membership[i * k + j] = static_cast<double>(tally[i * k + j]) / models;
      if (tally[i * k + j] == top) ++holders;
    }
    c.tie[i] = holders > 1 ? 1 : 0;
  }
  return c;
}

std::size_t ComparisonReport::changed_count() const noexcept {
  return static_cast<std::size_t>(std::count(changed.begin(), changed.end(), std::uint8_t{1}));
}

ComparisonReport compare_central(const CentralPartition& counterfactual,
                                 const CentralPartition& factual) {
  const std::size_t p = counterfactual.size();
  if (factual.size() != p) throw DataError("central partitions cover different point counts");
  if (!counterfactual.point_ids.empty() && !factual.point_ids.empty() &&
      counterfactual.point_ids != factual.point_ids)
    throw DataError("central partitions cover different point sets");
  const std::size_t k = std::max(counterfactual.k, factual.k);

  auto a = labels_only(counterfactual.modal_cluster, k);
  auto b = labels_only(factual.modal_cluster, k);
  const auto alignment = align_partitions(a, b);

  ComparisonReport r;
  r.k = k;
  r.point_ids = counterfactual.point_ids;
  r.permutation = alignment.permutation;
  r.changed.resize(p);
  r.probability_delta.assign(p * k, 0.0);
  r.clusters.resize(k);
  for (std::size_t i = 0; i < p; ++i) {
    const auto la = static_cast<std::size_t>(a.labels[i]);
    const auto lb = static_cast<std::size_t>(alignment.relabeled.labels[i]);
    r.changed[i] = la != lb ? 1 : 0;
    if (la != lb) {
      ++r.clusters[lb].gained;
      ++r.clusters[la].lost;
    }
    r.probability_delta[i * k + lb] += factual.probability[i];
    r.probability_delta[i * k + la] -= counterfactual.probability[i];
  }
  for (std::size_t c = 0; c < k; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < p; ++i) s += r.probability_delta[i * k + c];
    r.clusters[c].mean_probability_delta = p ? s / static_cast<double>(p) : 0.0;
  }
  return r;
}

void write_central_csv(std::ostream& out, const CentralPartition& c) {
  out << kCentralCsvHeader << '\n';
  for (std::size_t i = 0; i < c.size(); ++i)
    out << c.point_ids[i] << ',' << c.modal_cluster[i] << ',' << format_double(c.probability[i])
        << ',' << int(c.tie[i]) << '\n';
}

void save_central(const std::filesystem::path& path, const CentralPartition& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_central_csv(out, c);
}

CentralPartition read_central_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty central partition file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCentralCsvHeader)
    throw DataError(std::string("header must be exactly '") + kCentralCsvHeader + "'");
  CentralPartition c;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    const auto at = "line " + std::to_string(line_no) + ": ";
    int modal = -1, tie = -1;
    double prob = 0.0;
    auto parse = [](std::string_view s, auto& v) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
    };
    if (f.size() != 4 || f[0].empty() || !parse(f[1], modal) || !parse(f[2], prob) ||
        !parse(f[3], tie) || modal < 0 || !(prob > 0.0 && prob <= 1.0) || (tie != 0 && tie != 1))
      throw DataError(at + "malformed row");
    if (!seen.emplace(f[0]).second) throw DataError(at + "duplicate point_id");
    c.point_ids.emplace_back(f[0]);
    c.modal_cluster.push_back(modal);
    c.probability.push_back(prob);
    c.tie.push_back(static_cast<std::uint8_t>(tie));
  }
  if (c.modal_cluster.empty()) throw DataError("central partition file has no rows");
  c.k = static_cast<std::size_t>(*std::max_element(c.modal_cluster.begin(), c.modal_cluster.end())) + 1;
  return c;
}

CentralPartition load_central(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_central_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_changes_csv(std::ostream& out, const ComparisonReport& r) {
  out << "point_id,changed\n";
  for (std::size_t i = 0; i < r.changed.size(); ++i)
    out << r.point_ids[i] << ',' << int(r.changed[i]) << '\n';
}

}  // namespace rfamado
