#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "output_stage.hpp"
#include "rfamado/cli.hpp"
#include "rfamado/cluster.hpp"
#include "rfamado/dataset.hpp"
#include "rfamado/dissimilarity.hpp"
#include "rfamado/ensemble.hpp"

namespace fs = std::filesystem;
using namespace rfamado;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rfamado_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("RFAMADO_THREADS");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(dir_ / name, std::ios::binary) << content;
    return path(name);
  }

  // Two planted clusters per hemisphere, five points each.
  std::string write_spec(const std::string& name) const {
    nlohmann::json clusters = nlohmann::json::array();
    int id = 0;
    for (const double lat : {40.0, 60.0, -40.0, -60.0}) {
      nlohmann::json pts = nlohmann::json::array();
      for (int i = 0; i < 5; ++i)
        pts.push_back({{"id", "p" + std::to_string(id++)}, {"lat", lat}, {"lon", 5.0 * i}, {"scale", 1.0 + 0.2 * i}});
      clusters.push_back({{"id", "c" + std::to_string(lat)}, {"alpha", 0.1}, {"sigma", 1.0}, {"xi", 0.1}, {"points", pts}});
    }
    return write(name, nlohmann::json{{"years", 120}, {"clusters", clusters}}.dump());
  }

  fs::path dir_;
};

}  // namespace

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(CliTest, DissimOfScaledPairIsZero) {
  std::string csv = "point_id,lat,lon,year,value\n";
  const double y[] = {1.0, 2.0, 4.0, 5.0, 8.0, 3.5, 7.25};
  for (int t = 0; t < 7; ++t) csv += "a,10,0," + std::to_string(t) + "," + std::to_string(y[t]) + "\n";
  for (int t = 0; t < 7; ++t) csv += "b,10,1," + std::to_string(t) + "," + std::to_string(2 * y[t]) + "\n";
  const auto in = write("pair.csv", csv);
  const auto r = run({"dissim", "--input", in, "--output", path("d.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = load_dissimilarity(path("d.csv"));
  EXPECT_EQ(m.d_rfa(0, 1), 0.0);
  EXPECT_TRUE(fs::exists(path("d.csv.manifest.json")));
}

TEST_F(CliTest, UsageErrorsExitTwoWithoutOutputs) {
  const auto spec = write_spec("spec.json");
  ASSERT_EQ(run({"simulate", "--spec", spec, "--output", path("sim.csv")}).code, 0);

  auto r = run({"dissim", "--input", path("sim.csv"), "--output", path("x.csv"), "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_EQ(r.err.rfind("rfamado: error[usage]: ", 0), 0u);
  EXPECT_FALSE(fs::exists(path("x.csv")));
  EXPECT_FALSE(fs::exists(path("x.csv.manifest.json")));

  EXPECT_EQ(run({"dissim", "--input", path("sim.csv")}).code, 2);
  EXPECT_EQ(run({"dissim", "--input", path("missing.csv"), "--output", path("x.csv")}).code, 2);
  EXPECT_EQ(run({"dissim", "--input", path("sim.csv"), "--output", path("x.csv"), "--c-min", "5", "--c-max", "2"}).code, 2);
  EXPECT_EQ(run({"dissim", "--input", path("sim.csv"), "--output", path("nodir/x.csv")}).code, 2);
  EXPECT_EQ(run({"dissim", "--input", path("sim.csv"), "--output", path("x.csv"), "--hemisphere", "east"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"theory-surface", "--alphas", "0:1", "--output", path("s.csv")}).code, 2);
  EXPECT_EQ(run({"ensemble", "--partitions", spec, "--output", path("c.csv"), "--geojson", path("g.json")}).code, 2);
  EXPECT_FALSE(fs::exists(path("x.csv")));
  EXPECT_FALSE(fs::exists(path("s.csv")));
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, ThreadsEnvironmentFallback) {
  const auto spec = write_spec("spec.json");
  ASSERT_EQ(run({"simulate", "--spec", spec, "--output", path("sim.csv")}).code, 0);
  setenv("RFAMADO_THREADS", "many", 1);
  EXPECT_EQ(run({"dissim", "--input", path("sim.csv"), "--output", path("x.csv")}).code, 2);
  setenv("RFAMADO_THREADS", "3", 1);
  EXPECT_EQ(run({"dissim", "--input", path("sim.csv"), "--output", path("x.csv")}).code, 0);
  unsetenv("RFAMADO_THREADS");
}

TEST_F(CliTest, DataErrorsExitThree) {
  const auto bad = write("bad.csv", "point_id,lat,lon,year,value\na,0,0,1,1\na,0,0,2,-3\n");
  const auto r = run({"dissim", "--input", bad, "--output", path("x.csv")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("line 3: non-positive value"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("x.csv")));

  const auto spec = write("spec.json", R"({"years": 10, "clusters": [{"id": "a", "alpha": 2, "points": []}]})");
  EXPECT_EQ(run({"simulate", "--spec", spec, "--output", path("s.csv")}).code, 3);
  const auto junk = write("junk.json", "{not json");
  EXPECT_EQ(run({"simulate", "--spec", junk, "--output", path("s.csv")}).code, 3);

  const auto sim = write_spec("grid.json");
  ASSERT_EQ(run({"simulate", "--spec", sim, "--output", path("sim.csv")}).code, 0);
  EXPECT_EQ(run({"pipeline", "--input", path("sim.csv"), "--output-dir", path("out"), "--k", "20"}).code, 3);
  EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(CliTest, ManifestHashesMatchOutputs) {
  const auto spec = write_spec("spec.json");
  ASSERT_EQ(run({"simulate", "--spec", spec, "--seed", "5", "--output", path("sim.csv")}).code, 0);
  const auto doc = nlohmann::json::parse(slurp(path("sim.csv.manifest.json")));
  EXPECT_EQ(doc["config"]["seed"], 5);
  EXPECT_EQ(doc["inputs"][0]["sha256"], cli::sha256_hex(slurp(spec)));
  EXPECT_EQ(doc["outputs"][0]["sha256"], cli::sha256_hex(slurp(path("sim.csv"))));
  EXPECT_TRUE(doc["config"].contains("streams"));
}

TEST_F(CliTest, PipelineRecoversPlantedClustersAndIsThreadInvariant) {
  const auto spec = write_spec("spec.json");
  ASSERT_EQ(run({"simulate", "--spec", spec, "--seed", "3", "--output", path("sim.csv")}).code, 0);
  const auto r1 = run({"pipeline", "--input", path("sim.csv"), "--output-dir", path("o1"), "--k", "2", "--threads", "1"});
  ASSERT_EQ(r1.code, 0) << r1.err;
  const auto r2 = run({"--threads", "4", "pipeline", "--input", path("sim.csv"), "--output-dir", path("o2"), "--k", "2"});
  ASSERT_EQ(r2.code, 0) << r2.err;
  for (const char* f : {"north_dissim.csv", "north_partition.csv", "south_dissim.csv", "south_partition.csv"})
    EXPECT_EQ(slurp(dir_ / "o1" / f), slurp(dir_ / "o2" / f)) << f;
  const auto m1 = nlohmann::json::parse(slurp(dir_ / "o1" / "manifest.json"));
  const auto m2 = nlohmann::json::parse(slurp(dir_ / "o2" / "manifest.json"));
  for (std::size_t i = 0; i < m1["outputs"].size(); ++i)
    EXPECT_EQ(m1["outputs"][i]["sha256"], m2["outputs"][i]["sha256"]);

  // Points were planted five at a time per cluster, in id order.
  for (const char* f : {"north_partition.csv", "south_partition.csv"}) {
    const auto part = load_partition(dir_ / "o1" / f);
    ASSERT_EQ(part.size(), 10u);
    for (std::size_t i = 1; i < 10; ++i)
      EXPECT_EQ(part.labels[i] == part.labels[0], i < 5) << f << ' ' << i;
  }
}

TEST_F(CliTest, ClusterEnsembleCompareChain) {
  const auto spec = write_spec("spec.json");
  ASSERT_EQ(run({"simulate", "--spec", spec, "--output", path("sim.csv")}).code, 0);
  ASSERT_EQ(run({"dissim", "--input", path("sim.csv"), "--hemisphere", "north", "--output", path("d.csv")}).code, 0);
  auto r = run({"cluster", "--dissim", path("d.csv"), "--k", "2", "--output", path("pA.csv"), "--input",
                path("sim.csv"), "--hemisphere", "north", "--silhouette-range", "2:3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("k,silhouette,total_cost\n2,"), std::string::npos);
  const auto pa = load_partition(path("pA.csv"));
  EXPECT_EQ(pa.point_ids.front(), "p0");

  // A relabelled copy in reverse row order stands in for a second model.
  std::string flipped = "point_id,cluster,is_medoid\n";
  for (std::size_t i = pa.size(); i-- > 0;) {
    const bool med = pa.medoids[static_cast<std::size_t>(pa.labels[i])] == i;
    flipped += pa.point_ids[i] + "," + std::to_string(1 - pa.labels[i]) + "," + (med ? "1" : "0") + "\n";
  }
  write("pB.csv", flipped);
  r = run({"ensemble", "--partitions", path("pB.csv") + "," + path("pA.csv"), "--output", path("central.csv"),
           "--geojson", path("central.geojson"), "--input", path("sim.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto central = load_central(path("central.csv"));
  for (const double p : central.probability) EXPECT_EQ(p, 1.0);
  // pA sorts first, so its labels seed the consensus.
  EXPECT_EQ(central.modal_cluster, pa.labels);
  const auto gj = nlohmann::json::parse(slurp(path("central.geojson")));
  EXPECT_EQ(gj["type"], "FeatureCollection");
  EXPECT_EQ(gj["features"].size(), 10u);
  EXPECT_EQ(gj["features"][0]["geometry"]["coordinates"][1], 40.0);

  r = run({"compare", "--a", path("central.csv"), "--b", path("central.csv"), "--output", path("ch.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("ch.csv")).substr(0, 17), "point_id,changed\n");
  EXPECT_EQ(slurp(path("ch.csv")).find(",1\n"), std::string::npos);
}

TEST_F(CliTest, ShuffleTestAndSurface) {
  const auto spec = write_spec("spec.json");
  ASSERT_EQ(run({"simulate", "--spec", spec, "--output", path("sim.csv")}).code, 0);
  auto r = run({"shuffle-test", "--input", path("sim.csv"), "--hemisphere", "south", "--k", "2", "--seed", "9",
                "--output", path("abl.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("fraction_original_lower,", 0), 0u);
  const auto doc = nlohmann::json::parse(slurp(path("abl.csv.manifest.json")));
  EXPECT_EQ(doc["config"]["seed"], 9);

  r = run({"theory-surface", "--alphas", "0.5:1:2", "--ratios", "1:2:2", "--output", path("s.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(slurp(path("s.csv")));
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "alpha,ratio,d_star,c_star");
  int rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  EXPECT_EQ(rows, 4);
}
