#include <gtest/gtest.h>

#include <sstream>

#include "../support/oracles.hpp"
#include "rfamado/dissimilarity.hpp"
#include "rfamado/error.hpp"

using namespace rfamado;

namespace {

Dataset random_dataset(std::size_t p, std::size_t n, std::uint64_t seed) {
  oracle::Gen gen(seed);
  std::vector<GridSeries> pts;
  for (std::size_t i = 0; i < p; ++i) {
    GridSeries s;
    s.point_id = "p" + std::to_string(i);
    s.values = gen.positive(n);
    for (std::size_t y = 0; y < n; ++y) s.years.push_back(static_cast<int>(y));
    pts.push_back(std::move(s));
  }
  return Dataset("r", std::move(pts));
}

}  // namespace

TEST(DissimilarityMatrix, StructureAndPairwiseAgreement) {
  const auto d = random_dataset(12, 40, 51);
  CStarConfig raw;
  raw.prescale = false;
  const auto m = dissimilarity_matrix(d, raw);
  ASSERT_EQ(m.size(), 12u);
  EXPECT_EQ(m.point_ids, d.point_ids());
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(m.d_rfa(i, i), 0.0);
    EXPECT_EQ(m.d_fmad(i, i), 0.0);
    for (std::size_t j = i + 1; j < 12; ++j) {
      EXPECT_EQ(m.d_rfa(i, j), m.d_rfa(j, i));
      EXPECT_EQ(m.c_star(j, i), 1.0 / m.c_star(i, j));
      const auto r = optimal_c(d[i].values, d[j].values, raw);
      EXPECT_EQ(m.d_rfa(i, j), r.d_rfa);
      EXPECT_EQ(m.c_star(i, j), r.c_star);
      EXPECT_EQ(m.d_fmad(i, j), fmadogram(d[i].values, d[j].values));
    }
  }
}

TEST(DissimilarityMatrix, PrescaleUsesMeanRescaledSeries) {
  const auto d = random_dataset(5, 30, 52);
  const auto m = dissimilarity_matrix(d);
  const auto r = optimal_c(rescale_by_mean(d[1]).values, rescale_by_mean(d[3]).values);
  EXPECT_EQ(m.d_rfa(1, 3), r.d_rfa);
  EXPECT_EQ(m.c_star(1, 3), r.c_star);
}

TEST(DissimilarityMatrix, IdenticalAcrossThreadCounts) {
  const auto d = random_dataset(40, 50, 53);
  const auto a = dissimilarity_matrix(d, {}, 1);
  for (const unsigned t : {2u, 3u, 8u}) EXPECT_TRUE(dissimilarity_matrix(d, {}, t) == a) << t;
}

TEST(DissimilarityMatrix, RejectsTooSmallInput) {
  EXPECT_THROW(dissimilarity_matrix(random_dataset(1, 10, 1)), DomainError);
  EXPECT_THROW(dissimilarity_matrix(random_dataset(3, 1, 1)), DomainError);
}

TEST(DissimilarityCsv, RoundTrip) {
  const auto d = random_dataset(6, 25, 54);
  const auto m = dissimilarity_matrix(d);
  std::stringstream s;
  write_dissimilarity_csv(s, m);
  const auto back = read_dissimilarity_csv(s);
  EXPECT_EQ(back.d_rfa, m.d_rfa);
  EXPECT_EQ(back.d_fmad, m.d_fmad);
  EXPECT_EQ(back.boundary, m.boundary);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) EXPECT_EQ(back.c_star(i, j), m.c_star(i, j));
  EXPECT_EQ(back.point_ids[4], "4");
}

TEST(DissimilarityCsv, RejectsIncompleteOrDuplicatePairs) {
  auto read = [](const std::string& body) {
    std::istringstream in(std::string(kDissimilarityCsvHeader) + "\n" + body);
    return read_dissimilarity_csv(in);
  };
  EXPECT_NO_THROW(read("0,1,0.1,0.1,1,0\n0,2,0.1,0.1,1,0\n1,2,0.1,0.1,1,0\n"));
  EXPECT_THROW(read("0,1,0.1,0.1,1,0\n0,2,0.1,0.1,1,0\n"), DataError);
  EXPECT_THROW(read("0,1,0.1,0.1,1,0\n0,1,0.1,0.1,1,0\n1,2,0.1,0.1,1,0\n"), DataError);
  EXPECT_THROW(read("1,0,0.1,0.1,1,0\n"), DataError);
  EXPECT_THROW(read("0,1,-0.1,0.1,1,0\n"), DataError);
  EXPECT_THROW(read(""), DataError);
  std::istringstream bad_header("a,b\n");
  EXPECT_THROW(read_dissimilarity_csv(bad_header), DataError);
}
