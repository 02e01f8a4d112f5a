#include "rfamado/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "rfamado/error.hpp"
#include "rfamado/random.hpp"

namespace rfamado {

namespace {

std::string where(const std::string& point_id) { return "point '" + point_id + "'"; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && !text.empty();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void validate_series(const GridSeries& s) {
  if (s.point_id.empty()) throw DataError("empty point_id");
  if (!(s.lat >= -90.0 && s.lat <= 90.0))
    throw DataError(where(s.point_id) + ": latitude out of [-90, 90]");
  if (!(s.lon >= -180.0 && s.lon < 180.0))
    throw DataError(where(s.point_id) + ": longitude out of [-180, 180)");
  if (s.values.size() != s.years.size())
    throw DataError(where(s.point_id) + ": values and years differ in length");
  for (const double v : s.values) {
    if (!std::isfinite(v)) throw DataError(where(s.point_id) + ": non-finite value");
    if (v <= 0.0) throw DataError(where(s.point_id) + ": non-positive value");
  }
  for (std::size_t i = 1; i < s.years.size(); ++i)
    if (s.years[i] <= s.years[i - 1])
      throw DataError(where(s.point_id) + ": years not strictly increasing");
}

Dataset::Dataset(std::string label, std::vector<GridSeries> points)
    : label_(std::move(label)), points_(std::move(points)) {
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& s = points_[i];
    validate_series(s);
    if (!seen.emplace(s.point_id, i).second)
      throw DataError("duplicate point_id '" + s.point_id + "'");
    if (s.values.empty()) throw DataError(where(s.point_id) + ": empty series");
    if (i > 0 && s.years != points_[0].years) {
      if (s.years.size() != points_[0].years.size())
        throw DataError("ragged series: " + where(s.point_id) + " has " +
                        std::to_string(s.years.size()) + " years, " +
                        where(points_[0].point_id) + " has " +
                        std::to_string(points_[0].years.size()));
      throw DataError(where(s.point_id) + ": time index differs from " +
                      where(points_[0].point_id));
    }
  }
}

std::size_t Dataset::series_length() const noexcept {
  return points_.empty() ? 0 : points_.front().values.size();
}

std::vector<std::string> Dataset::point_ids() const {
  std::vector<std::string> ids;
  ids.reserve(points_.size());
  for (const auto& s : points_) ids.push_back(s.point_id);
  return ids;
}

Dataset read_dataset_csv(std::istream& in, std::string label) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (line != kDatasetCsvHeader)
    throw DataError(std::string("missing columns: header must be exactly '") +
                    kDatasetCsvHeader + "'");

  struct Row {
    int year;
    double value;
  };
  std::vector<GridSeries> points;
  std::vector<std::vector<Row>> rows;
  std::unordered_map<std::string, std::size_t> index;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    const auto at = "line " + std::to_string(line_no) + ": ";
    if (fields.size() != 5)
      throw DataError(at + "expected 5 fields, found " + std::to_string(fields.size()));
    double lat = 0, lon = 0, value = 0;
    int year = 0;
    if (fields[0].empty()) throw DataError(at + "empty point_id");
    if (!parse_number(fields[1], lat)) throw DataError(at + "bad lat");
    if (!parse_number(fields[2], lon)) throw DataError(at + "bad lon");
    if (!parse_number(fields[3], year)) throw DataError(at + "bad year");
    if (!parse_number(fields[4], value)) throw DataError(at + "bad value");
    if (!std::isfinite(value)) throw DataError(at + "non-finite value");
    if (value <= 0.0) throw DataError(at + "non-positive value");

    const std::string id(fields[0]);
    auto [it, inserted] = index.emplace(id, points.size());
    if (inserted) {
      GridSeries s;
      s.point_id = id;
      s.lat = lat;
      s.lon = lon;
      points.push_back(std::move(s));
      rows.emplace_back();
    } else {
      const auto& s = points[it->second];
      if (s.lat != lat || s.lon != lon)
        throw DataError(at + "inconsistent coordinates for point '" + id + "'");
    }
    rows[it->second].push_back({year, value});
  }

  for (std::size_t p = 0; p < points.size(); ++p) {
    auto& r = rows[p];
    std::stable_sort(r.begin(), r.end(),
                     [](const Row& a, const Row& b) { return a.year < b.year; });
    for (std::size_t i = 1; i < r.size(); ++i)
      if (r[i].year == r[i - 1].year)
        throw DataError("duplicate (point_id, year) = ('" + points[p].point_id + "', " +
                        std::to_string(r[i].year) + ")");
    if (r.size() < 2)
      throw DataError(where(points[p].point_id) + ": series needs at least 2 years");
    for (const auto& row : r) {
      points[p].years.push_back(row.year);
      points[p].values.push_back(row.value);
    }
  }
  return Dataset(std::move(label), std::move(points));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_dataset_csv(in, path.stem().string());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_dataset_csv(std::ostream& out, const Dataset& d) {
  out << kDatasetCsvHeader << '\n';
  for (const auto& s : d.points()) {
    const auto lat = format_double(s.lat);
    const auto lon = format_double(s.lon);
    for (std::size_t i = 0; i < s.values.size(); ++i)
      out << s.point_id << ',' << lat << ',' << lon << ',' << s.years[i] << ','
          << format_double(s.values[i]) << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_dataset_csv(out, d);
}

std::pair<Dataset, Dataset> split_hemispheres(const Dataset& d) {
  std::vector<GridSeries> north, south;
  for (const auto& s : d.points()) (s.lat >= 0.0 ? north : south).push_back(s);
  if (!d.empty() && (north.empty() || south.empty()))
    std::clog << "[rfamado] warning: " << (north.empty() ? "northern" : "southern")
              << " hemisphere is empty\n";
  return {Dataset(d.label() + "/north", std::move(north)),
          Dataset(d.label() + "/south", std::move(south))};
}

GridSeries rescale_by_mean(const GridSeries& s) {
  if (s.values.empty()) throw DataError(where(s.point_id) + ": cannot rescale empty series");
  const double mean =
      std::accumulate(s.values.begin(), s.values.end(), 0.0) / static_cast<double>(s.values.size());
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw DataError(where(s.point_id) + ": mean is zero or overflows");
  GridSeries out = s;
  for (auto& v : out.values) v /= mean;
  return out;
}

Dataset shuffle_in_time(const Dataset& d, std::uint64_t seed) {
  std::vector<GridSeries> points(d.points().begin(), d.points().end());
  for (auto& s : points) {
    SplitMix64 rng(derive_seed(seed, s.point_id));
    fisher_yates_shuffle(std::span<double>(s.values), rng);
  }
  return Dataset(d.label() + "/shuffled", std::move(points));
}

}  // namespace rfamado
