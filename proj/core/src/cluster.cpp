#include "rfamado/cluster.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <string_view>
#include <unordered_map>

#include "rfamado/error.hpp"
#include "rfamado/parallel.hpp"

namespace rfamado {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Nearest {
  std::vector<double> first;
  std::vector<std::size_t> slot;
  std::vector<double> second;
};

Nearest nearest_medoids(const SquareMatrix& D, const std::vector<std::size_t>& medoids) {
  const auto p = D.size();
  Nearest n{std::vector<double>(p, kInf), std::vector<std::size_t>(p, 0),
            std::vector<double>(p, kInf)};
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t s = 0; s < medoids.size(); ++s) {
      const double d = D(j, medoids[s]);
      if (d < n.first[j]) {
        n.second[j] = n.first[j];
        n.first[j] = d;
        n.slot[j] = s;
      } else if (d < n.second[j]) {
        n.second[j] = d;
      }
    }
  }
  return n;
}

double sum_in_order(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void validate_dissimilarity(const SquareMatrix& D) {
  const auto p = D.size();
  for (std::size_t i = 0; i < p; ++i) {
    if (D(i, i) != 0.0) throw DomainError("dissimilarity diagonal must be zero");
    for (std::size_t j = i + 1; j < p; ++j) {
      const double a = D(i, j), b = D(j, i);
      if (!std::isfinite(a) || a < 0.0) throw DomainError("dissimilarities must be finite and >= 0");
      if (a != b)
        throw DomainError("dissimilarity matrix is not symmetric at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
    }
  }
}

Partition pam(const SquareMatrix& D, std::size_t k, unsigned threads) {
  const std::size_t p = D.size();
  if (k < 1) throw DomainError("k must be >= 1");
  if (k > p) throw DomainError("k = " + std::to_string(k) + " exceeds p = " + std::to_string(p));
  validate_dissimilarity(D);
  const unsigned workers = resolve_threads(threads);

  std::vector<std::size_t> medoids;
  std::vector<std::uint8_t> is_medoid(p, 0);
  std::vector<double> nearest(p, kInf);
  std::vector<double> candidate_cost(p);

  // BUILD
  while (medoids.size() < k) {
    parallel_for(p, workers, [&](std::size_t o, unsigned) {
      if (is_medoid[o]) {
        candidate_cost[o] = kInf;
        return;
      }
      double cost = 0.0;
      for (std::size_t j = 0; j < p; ++j) cost += std::min(nearest[j], D(j, o));
      candidate_cost[o] = cost;
    });
    std::size_t best = p;
    for (std::size_t o = 0; o < p; ++o)
      if (!is_medoid[o] && (best == p || candidate_cost[o] < candidate_cost[best])) best = o;
    medoids.push_back(best);
    is_medoid[best] = 1;
    for (std::size_t j = 0; j < p; ++j) nearest[j] = std::min(nearest[j], D(j, best));
  }

  Partition part;
  part.k = k;
  auto near = nearest_medoids(D, medoids);
  double current = sum_in_order(near.first);
  part.cost_trace.push_back(current);

  // SWAP
  std::vector<double> swap_cost(k * p);
  for (;;) {
    parallel_for(p, workers, [&](std::size_t o, unsigned) {
      for (std::size_t s = 0; s < k; ++s) swap_cost[s * p + o] = kInf;
      if (is_medoid[o]) return;
      for (std::size_t s = 0; s < k; ++s) {
        double cost = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
          const double d = D(j, o);
          cost += near.slot[j] == s ? std::min(d, near.second[j]) : std::min(near.first[j], d);
        }
        swap_cost[s * p + o] = cost;
      }
    });
    std::size_t best = swap_cost.size();
    for (std::size_t q = 0; q < swap_cost.size(); ++q)
      if (swap_cost[q] < current && (best == swap_cost.size() || swap_cost[q] < swap_cost[best]))
        best = q;
    if (best == swap_cost.size()) break;

    const std::size_t slot = best / p, incoming = best % p;
    is_medoid[medoids[slot]] = 0;
    is_medoid[incoming] = 1;
    medoids[slot] = incoming;
    near = nearest_medoids(D, medoids);
    current = sum_in_order(near.first);
    part.cost_trace.push_back(current);
  }

  part.medoids = medoids;
  part.labels.resize(p);
  for (std::size_t j = 0; j < p; ++j) part.labels[j] = static_cast<int>(near.slot[j]);
  for (std::size_t s = 0; s < k; ++s) part.labels[medoids[s]] = static_cast<int>(s);
  part.total_cost = partition_cost(D, part);
  return part;
}

Partition pam(const DissimilarityMatrix& D, std::size_t k, unsigned threads) {
  auto part = pam(D.d_rfa, k, threads);
  part.point_ids = D.point_ids;
  return part;
}

double partition_cost(const SquareMatrix& D, const Partition& part) {
  double cost = 0.0;
  for (std::size_t i = 0; i < part.labels.size(); ++i)
    cost += D(i, part.medoids.at(static_cast<std::size_t>(part.labels[i])));
  return cost;
}

double silhouette(const SquareMatrix& D, const Partition& part) {
  const auto p = part.labels.size();
  const auto k = part.k;
  if (k < 2) throw DomainError("silhouette needs k >= 2");
  if (D.size() != p) throw DomainError("partition and matrix sizes differ");
  std::vector<std::size_t> sizes(k, 0);
  for (const int l : part.labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= k) throw DomainError("label out of range");
    ++sizes[static_cast<std::size_t>(l)];
  }
  for (const auto s : sizes)
    if (s == 0) throw DomainError("silhouette needs every cluster nonempty");

  double total = 0.0;
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < p; ++i) {
    const auto own = static_cast<std::size_t>(part.labels[i]);
    if (sizes[own] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < p; ++j)
      if (j != i) sums[static_cast<std::size_t>(part.labels[j])] += D(i, j);
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = kInf;
    for (std::size_t c = 0; c < k; ++c)
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(p);
}

void write_partition_csv(std::ostream& out, const Partition& part) {
  out << kPartitionCsvHeader << '\n';
  std::vector<std::uint8_t> medoid(part.labels.size(), 0);
  for (const auto m : part.medoids)
    if (m < medoid.size()) medoid[m] = 1;
  for (std::size_t i = 0; i < part.labels.size(); ++i) {
    const std::string id = part.point_ids.empty() ? std::to_string(i) : part.point_ids[i];
    out << id << ',' << part.labels[i] << ',' << int(medoid[i]) << '\n';
  }
}

void save_partition(const std::filesystem::path& path, const Partition& part) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_partition_csv(out, part);
}

Partition read_partition_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty partition file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPartitionCsvHeader)
    throw DataError(std::string("header must be exactly '") + kPartitionCsvHeader + "'");

  Partition part;
  std::vector<std::pair<int, std::size_t>> medoid_rows;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto at = "line " + std::to_string(line_no) + ": ";
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      throw DataError(at + "expected 3 fields");
    const std::string id = line.substr(0, c1);
    const std::string_view label_text(line.data() + c1 + 1, c2 - c1 - 1);
    const std::string_view medoid_text(line.data() + c2 + 1, line.size() - c2 - 1);
    int label = -1, medoid = -1;
    auto r1 = std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
    auto r2 = std::from_chars(medoid_text.data(), medoid_text.data() + medoid_text.size(), medoid);
    if (id.empty() || r1.ec != std::errc{} || r1.ptr != label_text.data() + label_text.size() ||
        r2.ec != std::errc{} || r2.ptr != medoid_text.data() + medoid_text.size() || label < 0 ||
        (medoid != 0 && medoid != 1))
      throw DataError(at + "malformed row");
    if (!seen.emplace(id, part.labels.size()).second)
      throw DataError(at + "duplicate point_id '" + id + "'");
    if (medoid == 1) medoid_rows.emplace_back(label, part.labels.size());
    part.point_ids.push_back(id);
    part.labels.push_back(label);
  }
  if (part.labels.empty()) throw DataError("partition file has no rows");
  part.k = static_cast<std::size_t>(*std::max_element(part.labels.begin(), part.labels.end())) + 1;
  if (!medoid_rows.empty()) {
    part.medoids.assign(part.k, std::numeric_limits<std::size_t>::max());
    for (const auto& [label, idx] : medoid_rows) {
      auto& slot = part.medoids[static_cast<std::size_t>(label)];
      if (slot != std::numeric_limits<std::size_t>::max())
        throw DataError("cluster " + std::to_string(label) + " has more than one medoid");
      slot = idx;
    }
    for (std::size_t c = 0; c < part.k; ++c)
      if (part.medoids[c] == std::numeric_limits<std::size_t>::max())
        throw DataError("cluster " + std::to_string(c) + " has no medoid");
  }
  return part;
}

Partition load_partition(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_partition_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

AblationReport shuffle_ablation(const Dataset& d, std::size_t k, std::uint64_t seed,
                                const CStarConfig& cfg, unsigned threads) {
  const auto shuffled_data = shuffle_in_time(d, seed);
  const auto m_orig = dissimilarity_matrix(d, cfg, threads);
  const auto m_shuf = dissimilarity_matrix(shuffled_data, cfg, threads);

  AblationReport r;
  r.original = pam(m_orig, k, threads);
  r.shuffled = pam(m_shuf, k, threads);
  r.point_ids = d.point_ids();
  const auto p = d.size();
  r.d_original.resize(p);
  r.d_shuffled.resize(p);
  std::size_t lower = 0;
  for (std::size_t i = 0; i < p; ++i) {
    r.d_original[i] = m_orig.d_rfa(i, r.original.medoids[static_cast<std::size_t>(r.original.labels[i])]);
    r.d_shuffled[i] = m_shuf.d_rfa(i, r.shuffled.medoids[static_cast<std::size_t>(r.shuffled.labels[i])]);
    if (r.d_original[i] < r.d_shuffled[i]) ++lower;
  }
  r.fraction_original_lower = static_cast<double>(lower) / static_cast<double>(p);
  return r;
}

void write_ablation_csv(std::ostream& out, const AblationReport& r) {
  out << "point_id,d_original,d_shuffled,original_lower\n";
  for (std::size_t i = 0; i < r.point_ids.size(); ++i)
    out << r.point_ids[i] << ',' << format_double(r.d_original[i]) << ','
        << format_double(r.d_shuffled[i]) << ',' << (r.d_original[i] < r.d_shuffled[i] ? 1 : 0)
        << '\n';
}

}  // namespace rfamado
