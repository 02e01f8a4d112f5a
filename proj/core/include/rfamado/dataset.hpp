#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rfamado {

/// Annual-maxima series at one grid point.
struct GridSeries {
  std::string point_id;
  double lat = 0.0;  ///< degrees, [-90, 90]
  double lon = 0.0;  ///< degrees, [-180, 180)
  std::vector<double> values;
  std::vector<int> years;

  friend bool operator==(const GridSeries&, const GridSeries&) = default;
};

/// Throws DataError unless values are positive and finite, years strictly
/// increase, lengths agree and coordinates are in range.
void validate_series(const GridSeries& s);

/// A labelled set of grid series sharing one time index. Immutable once
/// constructed; the constructor enforces every invariant.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string label, std::vector<GridSeries> points);

  const std::string& label() const noexcept { return label_; }
  std::span<const GridSeries> points() const noexcept { return points_; }
  const GridSeries& operator[](std::size_t i) const { return points_.at(i); }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  /// Common series length n (0 for an empty dataset).
  std::size_t series_length() const noexcept;
  std::vector<std::string> point_ids() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::string label_;
  std::vector<GridSeries> points_;
};

/// Long-CSV header shared by the reader and writer.
inline constexpr const char* kDatasetCsvHeader = "point_id,lat,lon,year,value";

/// Parses the long-CSV format. Points keep their first-appearance order and
/// each series is sorted by year. Rows are never dropped: any malformed row
/// fails the whole load with a DataError naming the line.
Dataset read_dataset_csv(std::istream& in, std::string label = {});
Dataset load_dataset(const std::filesystem::path& path);

/// Writes the long-CSV format with shortest round-trip number formatting, so
/// `load_dataset(save_dataset(d)) == d`.
void write_dataset_csv(std::ostream& out, const Dataset& d);
void save_dataset(const std::filesystem::path& path, const Dataset& d);

/// (northern, southern); lat == 0 goes north.
std::pair<Dataset, Dataset> split_hemispheres(const Dataset& d);

/// Divides every value by the empirical mean.
GridSeries rescale_by_mean(const GridSeries& s);

/// Independently permutes every series in time (Fisher-Yates, SplitMix64).
/// Point i uses the stream derive_seed(seed, point_id), so the result does
/// not depend on point order.
Dataset shuffle_in_time(const Dataset& d, std::uint64_t seed);

}  // namespace rfamado
