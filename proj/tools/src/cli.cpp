#include "rfamado/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "commands.hpp"
#include "rfamado/dissimilarity.hpp"
#include "rfamado/error.hpp"
#include "usage_error.hpp"

namespace rfamado::cli {

namespace {

// Errors must fit on one line for machine parsing.
std::string one_line(std::string msg) {
  for (auto& ch : msg)
    if (ch == '\n' || ch == '\r') ch = ' ';
  while (!msg.empty() && msg.back() == ' ') msg.pop_back();
  return msg;
}

int fail(std::ostream& err, ExitCode code, const char* kind, const std::string& msg) {
  err << "rfamado: error[" << kind << "]: " << one_line(msg) << '\n';
  return code;
}

unsigned threads_from_env() {
  const char* env = std::getenv("RFAMADO_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  unsigned v = 0;
  const std::string_view s(env);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw UsageError("RFAMADO_THREADS must be a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

void add_cstar_options(CLI::App* cmd, CStarOptions& o) {
  cmd->add_option("--k-grid", o.grid_points, "Log-spaced c grid size")
      ->capture_default_str()
      ->check(CLI::Range(3, 1 << 20));
  cmd->add_option("--c-min", o.c_min, "Smallest scale c searched")->capture_default_str();
  cmd->add_option("--c-max", o.c_max, "Largest scale c searched")->capture_default_str();
  cmd->add_option("--refine", o.refine, "Step-halving rounds around the grid argmin")
      ->capture_default_str()
      ->check(CLI::Range(0, 60));
  cmd->add_flag("--no-prescale", o.no_prescale, "Do not divide each series by its mean first");
  cmd->add_option("--ecdf", o.ecdf, "Empirical CDF denominator")
      ->capture_default_str()
      ->check(CLI::IsMember({"n", "n+1"}));
}

CLI::Option* add_hemisphere(CLI::App* cmd, std::string& target) {
  return cmd->add_option("--hemisphere", target, "Which points to use; lat 0 counts as north")
      ->capture_default_str()
      ->check(CLI::IsMember({"north", "south", "both"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"RFA-madogram dissimilarities, PAM regions and ensemble central partitions",
               "rfamado"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::optional<unsigned> threads;
  app.add_option("--threads", threads, "Worker threads (0 = all cores; default $RFAMADO_THREADS)")
      ->check(CLI::NonNegativeNumber);

  DissimOptions dissim;
  auto* c_dissim = app.add_subcommand("dissim", "Pairwise RFA-madogram matrix");
  c_dissim->add_option("--input", dissim.input, "Long-CSV dataset")->required()->check(CLI::ExistingFile);
  add_hemisphere(c_dissim, dissim.hemisphere);
  c_dissim->add_option("--output", dissim.output, "Matrix CSV")->required();
  add_cstar_options(c_dissim, dissim.cstar);

  ClusterOptions cluster;
  auto* c_cluster = app.add_subcommand("cluster", "PAM on a dissimilarity matrix");
  c_cluster->add_option("--dissim", cluster.dissim, "Matrix CSV")->required()->check(CLI::ExistingFile);
  c_cluster->add_option("--k", cluster.k, "Number of clusters")->capture_default_str();
  c_cluster->add_option("--output", cluster.output, "Partition CSV")->required();
  c_cluster->add_option("--input", cluster.input, "Dataset supplying point ids")->check(CLI::ExistingFile);
  add_hemisphere(c_cluster, cluster.hemisphere);
  c_cluster->add_option("--silhouette-range", cluster.silhouette_range,
                        "Report silhouette for k in kmin:kmax on stdout");

  EnsembleOptions ensemble;
  auto* c_ensemble = app.add_subcommand("ensemble", "Central partition of several model partitions");
  c_ensemble->add_option("--partitions", ensemble.partitions, "Comma-separated partition CSVs")
      ->required()
      ->delimiter(',');
  c_ensemble->add_option("--output", ensemble.output, "Central partition CSV")->required();
  c_ensemble->add_option("--reference", ensemble.reference, "Align every model to this partition")
      ->check(CLI::ExistingFile);
  c_ensemble->add_option("--geojson", ensemble.geojson, "Also write point features");
  c_ensemble->add_option("--input", ensemble.input, "Dataset supplying coordinates")
      ->check(CLI::ExistingFile);

  CompareOptions compare;
  auto* c_compare = app.add_subcommand("compare", "Flag points whose modal cluster changes");
  c_compare->add_option("--a", compare.a, "Counterfactual central CSV")->required()->check(CLI::ExistingFile);
  c_compare->add_option("--b", compare.b, "Factual central CSV")->required()->check(CLI::ExistingFile);
  c_compare->add_option("--output", compare.output, "Changes CSV")->required();
  c_compare->add_option("--geojson", compare.geojson, "Also write point features");
  c_compare->add_option("--input", compare.input, "Dataset supplying coordinates")->check(CLI::ExistingFile);

  ShuffleOptions shuffle;
  auto* c_shuffle = app.add_subcommand("shuffle-test", "Compare medoid dissimilarities before and after shuffling in time");
  c_shuffle->add_option("--input", shuffle.input, "Long-CSV dataset")->required()->check(CLI::ExistingFile);
  add_hemisphere(c_shuffle, shuffle.hemisphere);
  c_shuffle->add_option("--k", shuffle.k, "Number of clusters")->capture_default_str();
  c_shuffle->add_option("--seed", shuffle.seed, "Shuffle seed")->capture_default_str();
  c_shuffle->add_option("--output", shuffle.output, "Per-point report CSV")->required();
  add_cstar_options(c_shuffle, shuffle.cstar);

  SimulateOptions simulate;
  auto* c_simulate = app.add_subcommand("simulate", "Draw a clustered logistic max-stable dataset");
  c_simulate->add_option("--spec", simulate.spec, "Grid spec JSON")->required()->check(CLI::ExistingFile);
  c_simulate->add_option("--seed", simulate.seed, "Seed")->capture_default_str();
  c_simulate->add_option("--output", simulate.output, "Long-CSV dataset")->required();

  SurfaceOptions surface;
  auto* c_surface = app.add_subcommand("theory-surface", "Optimal D over (alpha, xi1/xi2)");
  c_surface->add_option("--alphas", surface.alphas, "start:end:count")->capture_default_str();
  c_surface->add_option("--ratios", surface.ratios, "start:end:count of xi1/xi2")->capture_default_str();
  c_surface->add_option("--xi2", surface.xi2, "Shape of the second margin")->capture_default_str();
  c_surface->add_option("--abs-tol", surface.abs_tol, "Quadrature tolerance")->capture_default_str();
  c_surface->add_option("--max-subdivisions", surface.max_subdivisions, "Quadrature interval cap")
      ->capture_default_str();
  c_surface->add_option("--output", surface.output, "Surface CSV")->required();

  PipelineOptions pipeline;
  auto* c_pipeline = app.add_subcommand("pipeline", "Hemispheric split, dissimilarities and PAM");
  c_pipeline->add_option("--input", pipeline.input, "Long-CSV dataset")->required()->check(CLI::ExistingFile);
  c_pipeline->add_option("--output-dir", pipeline.output_dir, "Directory for all outputs")->required();
  c_pipeline->add_option("--k", pipeline.k, "Clusters per hemisphere")->capture_default_str();
  add_cstar_options(c_pipeline, pipeline.cstar);

  // Subcommands accept --threads too so it can follow the subcommand name.
  for (auto* sub : app.get_subcommands({}))
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, kExitUsage, "usage", e.what());
  }

  try {
    Context ctx{out, err, threads ? *threads : threads_from_env()};
    if (c_dissim->parsed()) run_dissim(dissim, ctx);
    else if (c_cluster->parsed()) run_cluster(cluster, ctx);
    else if (c_ensemble->parsed()) run_ensemble(ensemble, ctx);
    else if (c_compare->parsed()) run_compare(compare, ctx);
    else if (c_shuffle->parsed()) run_shuffle_test(shuffle, ctx);
    else if (c_simulate->parsed()) run_simulate(simulate, ctx);
    else if (c_surface->parsed()) run_theory_surface(surface, ctx);
    else if (c_pipeline->parsed()) run_pipeline(pipeline, ctx);
  } catch (const UsageError& e) {
    return fail(err, kExitUsage, "usage", e.what());
  } catch (const DataError& e) {
    return fail(err, kExitData, "data", e.what());
  } catch (const DomainError& e) {
    return fail(err, kExitData, "data", e.what());
  } catch (const PairError& e) {
    return fail(err, kExitNumeric, "numeric", e.what());
  } catch (const NumericError& e) {
    return fail(err, kExitNumeric, "numeric", e.what());
  } catch (const std::exception& e) {
    return fail(err, kExitInternal, "internal", e.what());
  }
  return kExitOk;
}

}  // namespace rfamado::cli
