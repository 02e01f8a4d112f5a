#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfamado/dataset.hpp"
#include "rfamado/madogram.hpp"

namespace rfamado {

/// Dense row-major p x p matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t p, double fill = 0.0) : p_(p), data_(p * p, fill) {}

  std::size_t size() const noexcept { return p_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * p_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * p_ + j]; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t p_ = 0;
  std::vector<double> data_;
};

/// Pairwise RFA-madogram dissimilarities with the fitted scale per pair.
/// d_rfa and d_fmad are symmetric with zero diagonal; c_star(j, i) is
/// 1 / c_star(i, j).
struct DissimilarityMatrix {
  std::vector<std::string> point_ids;
  SquareMatrix d_rfa;
  SquareMatrix d_fmad;
  SquareMatrix c_star;
  std::vector<std::uint8_t> boundary;    ///< p*p, 1 where the c* grid argmin hit an edge
  std::vector<std::uint8_t> degenerate;  ///< per point, 1 if the series is constant

  std::size_t size() const noexcept { return d_rfa.size(); }
  bool hit_boundary(std::size_t i, std::size_t j) const noexcept {
    return boundary[i * size() + j] != 0;
  }

  friend bool operator==(const DissimilarityMatrix&, const DissimilarityMatrix&) = default;
};

/// Raised when one pair fails; carries the offending indices.
class PairError : public std::runtime_error {
 public:
  PairError(std::size_t i, std::size_t j, const std::string& what)
      : std::runtime_error("pair (" + std::to_string(i) + ", " + std::to_string(j) + "): " + what),
        i_(i), j_(j) {}
  std::size_t i() const noexcept { return i_; }
  std::size_t j() const noexcept { return j_; }

 private:
  std::size_t i_, j_;
};

/// optimal_c for every pair i < j (on mean-rescaled series when
/// cfg.prescale). Pairs are handed out in chunks to `threads` workers (0 = all
/// cores); every cell is written by exactly one worker so the result is
/// bit-identical for any thread count.
DissimilarityMatrix dissimilarity_matrix(const Dataset& d, const CStarConfig& cfg = {},
                                         unsigned threads = 1);

/// CSV with header `i,j,d_rfa,d_fmad,c_star,boundary`, one row per i < j.
void write_dissimilarity_csv(std::ostream& out, const DissimilarityMatrix& m);
void save_dissimilarity(const std::filesystem::path& path, const DissimilarityMatrix& m);

/// Rebuilds a matrix from the CSV form. Point ids default to the decimal
/// index. Every pair i < j must be present exactly once.
DissimilarityMatrix read_dissimilarity_csv(std::istream& in);
DissimilarityMatrix load_dissimilarity(const std::filesystem::path& path);

inline constexpr const char* kDissimilarityCsvHeader = "i,j,d_rfa,d_fmad,c_star,boundary";

}  // namespace rfamado
