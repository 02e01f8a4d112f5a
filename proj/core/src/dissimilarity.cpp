#include "rfamado/dissimilarity.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <string_view>

#include "rfamado/error.hpp"
#include "rfamado/parallel.hpp"

namespace rfamado {

namespace {

constexpr std::size_t kPairsPerTask = 64;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

}  // namespace

DissimilarityMatrix dissimilarity_matrix(const Dataset& d, const CStarConfig& cfg,
                                         unsigned threads) {
  cfg.validate();
  const std::size_t p = d.size();
  if (p < 2) throw DomainError("dissimilarity matrix needs at least 2 points");
  if (d.series_length() < 2) throw DomainError("series need at least 2 values");
  const auto grid = log_c_grid(cfg);

  std::vector<SortedSeries> series;
  series.reserve(p);
  DissimilarityMatrix m;
  m.point_ids = d.point_ids();
  m.degenerate.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const auto& s = d[i];
    series.emplace_back(cfg.prescale ? rescale_by_mean(s).values : s.values);
    m.degenerate[i] = series.back().degenerate() ? 1 : 0;
  }

  m.d_rfa = SquareMatrix(p);
  m.d_fmad = SquareMatrix(p);
  m.c_star = SquareMatrix(p, 1.0);
  m.boundary.assign(p * p, 0);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(p * (p - 1) / 2);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));

  const unsigned workers = resolve_threads(threads);
  std::vector<RfaPairEvaluator> evaluators(workers);
  const std::size_t tasks = (pairs.size() + kPairsPerTask - 1) / kPairsPerTask;

  parallel_for(tasks, workers, [&](std::size_t task, unsigned w) {
    auto& eval = evaluators[w];
    const std::size_t end = std::min(pairs.size(), (task + 1) * kPairsPerTask);
    for (std::size_t q = task * kPairsPerTask; q < end; ++q) {
      const auto [i, j] = pairs[q];
      try {
        const auto r = eval.optimal_c(series[i], series[j], cfg, grid);
        const double fm = fmadogram(series[i], series[j], cfg.ecdf);
        m.d_rfa(i, j) = m.d_rfa(j, i) = r.d_rfa;
        m.d_fmad(i, j) = m.d_fmad(j, i) = fm;
        m.c_star(i, j) = r.c_star;
        m.c_star(j, i) = 1.0 / r.c_star;
        m.boundary[i * p + j] = m.boundary[j * p + i] = r.boundary ? 1 : 0;
      } catch (const std::exception& e) {
        throw PairError(i, j, e.what());
      }
    }
  });
  return m;
}

void write_dissimilarity_csv(std::ostream& out, const DissimilarityMatrix& m) {
  out << kDissimilarityCsvHeader << '\n';
  const auto p = m.size();
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      out << i << ',' << j << ',' << format_double(m.d_rfa(i, j)) << ','
          << format_double(m.d_fmad(i, j)) << ',' << format_double(m.c_star(i, j)) << ','
          << (m.hit_boundary(i, j) ? 1 : 0) << '\n';
}

void save_dissimilarity(const std::filesystem::path& path, const DissimilarityMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_dissimilarity_csv(out, m);
}

DissimilarityMatrix read_dissimilarity_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty dissimilarity file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDissimilarityCsvHeader)
    throw DataError(std::string("header must be exactly '") + kDissimilarityCsvHeader + "'");

  struct Row {
    std::size_t i, j;
    double d_rfa, d_fmad, c_star;
    int boundary;
  };
  std::vector<Row> rows;
  std::size_t p = 0;
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
    Row r{};
    if (f.size() != 6 || !parse_number(f[0], r.i) || !parse_number(f[1], r.j) ||
        !parse_number(f[2], r.d_rfa) || !parse_number(f[3], r.d_fmad) ||
        !parse_number(f[4], r.c_star) || !parse_number(f[5], r.boundary))
      throw DataError(at + "malformed row");
    if (r.i >= r.j) throw DataError(at + "rows must have i < j");
    if (!(r.d_rfa >= 0.0) || !(r.d_fmad >= 0.0)) throw DataError(at + "negative dissimilarity");
    if (!(r.c_star > 0.0)) throw DataError(at + "c_star must be positive");
    p = std::max(p, r.j + 1);
    rows.push_back(r);
  }
  if (p < 2) throw DataError("dissimilarity file has no pairs");
  if (rows.size() != p * (p - 1) / 2)
    throw DataError("expected " + std::to_string(p * (p - 1) / 2) + " pairs for p = " +
                    std::to_string(p) + ", found " + std::to_string(rows.size()));

  DissimilarityMatrix m;
  m.d_rfa = SquareMatrix(p);
  m.d_fmad = SquareMatrix(p);
  m.c_star = SquareMatrix(p, 1.0);
  m.boundary.assign(p * p, 0);
  m.degenerate.assign(p, 0);
  std::vector<std::uint8_t> seen(p * p, 0);
  for (const auto& r : rows) {
    if (seen[r.i * p + r.j]++)
      throw DataError("duplicate pair (" + std::to_string(r.i) + ", " + std::to_string(r.j) + ")");
    m.d_rfa(r.i, r.j) = m.d_rfa(r.j, r.i) = r.d_rfa;
    m.d_fmad(r.i, r.j) = m.d_fmad(r.j, r.i) = r.d_fmad;
    m.c_star(r.i, r.j) = r.c_star;
    m.c_star(r.j, r.i) = 1.0 / r.c_star;
    m.boundary[r.i * p + r.j] = m.boundary[r.j * p + r.i] = r.boundary ? 1 : 0;
  }
  m.point_ids.reserve(p);
  for (std::size_t i = 0; i < p; ++i) m.point_ids.push_back(std::to_string(i));
  return m;
}

DissimilarityMatrix load_dissimilarity(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_dissimilarity_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace rfamado
