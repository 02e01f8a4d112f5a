#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rfamado/madogram.hpp"

namespace rfamado::cli {

struct Context {
  std::ostream& out;
  std::ostream& err;
  unsigned threads = 0;  ///< resolved request; 0 = all cores
};

/// Flags shared by every command that runs the c* search.
struct CStarOptions {
  int grid_points = 129;
  double c_min = 0.1;
  double c_max = 10.0;
  int refine = 3;
  bool no_prescale = false;
  std::string ecdf = "n";

  CStarConfig config() const;
};

struct DissimOptions {
  std::string input;
  std::string hemisphere = "both";
  std::string output;
  CStarOptions cstar;
};

struct ClusterOptions {
  std::string dissim;
  std::size_t k = 4;
  std::string output;
  std::string input;
  std::string hemisphere = "both";
  std::string silhouette_range;
};

struct EnsembleOptions {
  std::vector<std::string> partitions;
  std::string output;
  std::string reference;
  std::string geojson;
  std::string input;
};

struct CompareOptions {
  std::string a;
  std::string b;
  std::string output;
  std::string geojson;
  std::string input;
};

struct ShuffleOptions {
  std::string input;
  std::string hemisphere = "both";
  std::size_t k = 4;
  std::uint64_t seed = 1;
  std::string output;
  CStarOptions cstar;
};

struct SimulateOptions {
  std::string spec;
  std::uint64_t seed = 1;
  std::string output;
};

struct SurfaceOptions {
  std::string alphas = "0.01:1:25";
  std::string ratios = "1:10:25";
  double xi2 = 0.01;
  double abs_tol = 1e-8;
  int max_subdivisions = 200;
  std::string output;
};

struct PipelineOptions {
  std::string input;
  std::string output_dir;
  std::size_t k = 4;
  CStarOptions cstar;
};

void run_dissim(const DissimOptions& o, Context& ctx);
void run_cluster(const ClusterOptions& o, Context& ctx);
void run_ensemble(const EnsembleOptions& o, Context& ctx);
void run_compare(const CompareOptions& o, Context& ctx);
void run_shuffle_test(const ShuffleOptions& o, Context& ctx);
void run_simulate(const SimulateOptions& o, Context& ctx);
void run_theory_surface(const SurfaceOptions& o, Context& ctx);
void run_pipeline(const PipelineOptions& o, Context& ctx);

/// "start:end:count" -> count evenly spaced values, both ends included.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace rfamado::cli
