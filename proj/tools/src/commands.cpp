#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "output_stage.hpp"
#include "rfamado/cluster.hpp"
#include "rfamado/dataset.hpp"
#include "rfamado/dissimilarity.hpp"
#include "rfamado/ensemble.hpp"
#include "rfamado/error.hpp"
#include "rfamado/gev_theory.hpp"
#include "rfamado/simulate.hpp"
#include "usage_error.hpp"

namespace rfamado::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename Writer>
std::string render(Writer&& write) {
  std::ostringstream s;
  write(s);
  return s.str();
}

fs::path manifest_for(const std::string& output) { return fs::path(output + ".manifest.json"); }

void log(Context& ctx, const char* stage, const std::string& msg) {
  ctx.err << '[' << stage << "] " << msg << '\n';
}

json cstar_json(const CStarOptions& o) {
  return {{"k_grid", o.grid_points}, {"c_min", o.c_min},      {"c_max", o.c_max},
          {"refine", o.refine},      {"prescale", !o.no_prescale}, {"ecdf", o.ecdf}};
}

Dataset select_hemisphere(const Dataset& d, const std::string& mode) {
  if (mode == "both") return d;
  auto [north, south] = split_hemispheres(d);
  Dataset& pick = mode == "north" ? north : south;
  if (pick.empty()) throw DataError("no points in the " + mode + "ern hemisphere");
  return pick;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// Puts `part` into the point order given by `ids`.
Partition reorder(const Partition& part, const std::vector<std::string>& ids, const std::string& name) {
  if (part.point_ids == ids) return part;
  if (part.size() != ids.size())
    throw DataError(name + ": has " + std::to_string(part.size()) + " points, expected " +
                    std::to_string(ids.size()));
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < part.point_ids.size(); ++i) where.emplace(part.point_ids[i], i);
  Partition r = part;
  std::vector<std::size_t> new_index(part.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto it = where.find(ids[i]);
    if (it == where.end()) throw DataError(name + ": missing point '" + ids[i] + "'");
    r.labels[i] = part.labels[it->second];
    new_index[it->second] = i;
  }
  for (auto& m : r.medoids) m = new_index[m];
  r.point_ids = ids;
  return r;
}

CentralPartition reorder(const CentralPartition& c, const std::vector<std::string>& ids,
                         const std::string& name) {
  if (c.point_ids == ids) return c;
  if (c.size() != ids.size())
    throw DataError(name + ": has " + std::to_string(c.size()) + " points, expected " +
                    std::to_string(ids.size()));
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < c.point_ids.size(); ++i) where.emplace(c.point_ids[i], i);
  CentralPartition r = c;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto it = where.find(ids[i]);
    if (it == where.end()) throw DataError(name + ": missing point '" + ids[i] + "'");
    r.modal_cluster[i] = c.modal_cluster[it->second];
    r.probability[i] = c.probability[it->second];
    r.tie[i] = c.tie[it->second];
  }
  r.point_ids = ids;
  return r;
}

struct Coordinates {
  std::unordered_map<std::string, std::pair<double, double>> by_id;

  explicit Coordinates(const Dataset& d) {
    for (const auto& s : d.points()) by_id.emplace(s.point_id, std::make_pair(s.lat, s.lon));
  }
  std::pair<double, double> at(const std::string& id) const {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("point '" + id + "' has no coordinates in --input");
    return it->second;
  }
};

json point_feature(const Coordinates& coords, const std::string& id, json properties) {
  const auto [lat, lon] = coords.at(id);
  properties["point_id"] = id;
  properties["lat"] = lat;
  properties["lon"] = lon;
  return {{"type", "Feature"},
          {"geometry", {{"type", "Point"}, {"coordinates", {lon, lat}}}},
          {"properties", std::move(properties)}};
}

void require_geojson_input(const std::string& geojson, const std::string& input) {
  if (!geojson.empty() && input.empty()) throw UsageError("--geojson needs --input for coordinates");
}

std::size_t parse_size(std::string_view s, const char* what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw UsageError(std::string("malformed ") + what + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

CStarConfig CStarOptions::config() const {
  CStarConfig cfg;
  cfg.grid_points = grid_points;
  cfg.c_min = c_min;
  cfg.c_max = c_max;
  cfg.refine_rounds = refine;
  cfg.prescale = !no_prescale;
  cfg.ecdf = ecdf == "n+1" ? EcdfDenominator::n_plus_one : EcdfDenominator::n;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string_view> parts;
  std::string_view rest(spec);
  for (;;) {
    const auto colon = rest.find(':');
    parts.push_back(rest.substr(0, colon));
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  if (parts.size() != 3) throw UsageError("grid '" + spec + "' must be start:end:count");
  double lo = 0.0, hi = 0.0;
  for (auto [s, v] : {std::pair{parts[0], &lo}, std::pair{parts[1], &hi}}) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(*v))
      throw UsageError("grid '" + spec + "' has a malformed bound");
  }
  const std::size_t count = parse_size(parts[2], "grid count");
  if (count == 0) throw UsageError("grid '" + spec + "' needs count >= 1");
  if (count == 1 && lo != hi) throw UsageError("grid '" + spec + "' with count 1 needs start == end");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  if (count > 1) v.back() = hi;
  return v;
}

void run_dissim(const DissimOptions& o, Context& ctx) {
  const CStarConfig cfg = o.cstar.config();
  check_output_paths({o.output});

  const Dataset d = select_hemisphere(load_dataset(o.input), o.hemisphere);
  log(ctx, "dissim", std::to_string(d.size()) + " points, n = " + std::to_string(d.series_length()));
  const auto m = dissimilarity_matrix(d, cfg, ctx.threads);
  std::size_t edge = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) edge += m.hit_boundary(i, j) ? 1 : 0;
  if (edge > 0) log(ctx, "dissim", std::to_string(edge) + " pairs hit the c grid boundary");

  OutputStage stage;
  stage.add_input(o.input);
  stage.add_output(o.output, render([&](std::ostream& s) { write_dissimilarity_csv(s, m); }));
  stage.commit(manifest_for(o.output),
                     {{"command", "dissim"}, {"input", o.input}, {"hemisphere", o.hemisphere},
                      {"output", o.output}, {"cstar", cstar_json(o.cstar)}});
}

void run_cluster(const ClusterOptions& o, Context& ctx) {
  if (o.k < 1) throw UsageError("--k must be >= 1");
  std::size_t k_lo = 0, k_hi = 0;
  if (!o.silhouette_range.empty()) {
    const auto colon = o.silhouette_range.find(':');
    if (colon == std::string::npos) throw UsageError("--silhouette-range must be kmin:kmax");
    k_lo = parse_size(std::string_view(o.silhouette_range).substr(0, colon), "k");
    k_hi = parse_size(std::string_view(o.silhouette_range).substr(colon + 1), "k");
    if (k_lo < 2 || k_hi < k_lo) throw UsageError("--silhouette-range needs 2 <= kmin <= kmax");
  }
  check_output_paths({o.output});

  auto m = load_dissimilarity(o.dissim);
  if (!o.input.empty()) {
    const Dataset d = select_hemisphere(load_dataset(o.input), o.hemisphere);
    if (d.size() != m.size())
      throw DataError("--input selects " + std::to_string(d.size()) + " points but the matrix has " +
                      std::to_string(m.size()));
    m.point_ids = d.point_ids();
  }
  Partition part = pam(m, o.k, ctx.threads);
  log(ctx, "cluster", "k = " + std::to_string(o.k) + ", cost = " + fmt(part.total_cost) + ", " +
                          std::to_string(part.cost_trace.size() - 1) + " swaps");
  json config = {{"command", "cluster"}, {"dissim", o.dissim}, {"k", o.k}, {"output", o.output}};
  if (o.k >= 2) {
    const double s = silhouette(m.d_rfa, part);
    log(ctx, "cluster", "silhouette = " + fmt(s));
  }
  if (k_hi > 0) {
    ctx.out << "k,silhouette,total_cost\n";
    for (std::size_t k = k_lo; k <= std::min(k_hi, m.size()); ++k) {
      const Partition pk = pam(m, k, ctx.threads);
      ctx.out << k << ',' << fmt(silhouette(m.d_rfa, pk)) << ',' << fmt(pk.total_cost) << '\n';
    }
    config["silhouette_range"] = o.silhouette_range;
  }

  OutputStage stage;
  stage.add_input(o.dissim);
  if (!o.input.empty()) {
    stage.add_input(o.input);
    config["input"] = o.input;
    config["hemisphere"] = o.hemisphere;
  }
  stage.add_output(o.output, render([&](std::ostream& s) { write_partition_csv(s, part); }));
  stage.commit(manifest_for(o.output), config);
}

void run_ensemble(const EnsembleOptions& o, Context& ctx) {
  require_geojson_input(o.geojson, o.input);
  if (o.partitions.empty()) throw UsageError("--partitions needs at least one file");
  // Model order is lexicographic by file name so the consensus is reproducible.
  std::vector<std::string> files = o.partitions;
  std::sort(files.begin(), files.end(), [](const std::string& a, const std::string& b) {
    const auto fa = fs::path(a).filename().string(), fb = fs::path(b).filename().string();
    return fa != fb ? fa < fb : a < b;
  });
  for (const auto& f : files)
    if (!fs::is_regular_file(f)) throw UsageError("partition file '" + f + "' does not exist");

  check_output_paths({o.output, o.geojson});

  std::vector<Partition> parts;
  parts.reserve(files.size());
  for (const auto& f : files) {
    Partition p = load_partition(f);
    parts.push_back(parts.empty() ? std::move(p) : reorder(p, parts.front().point_ids, f));
  }
  std::optional<std::vector<int>> reference;
  if (!o.reference.empty()) reference = reorder(load_partition(o.reference), parts.front().point_ids,
                                                o.reference).labels;
  const CentralPartition central = central_partition(parts, reference);

  std::size_t ties = 0;
  for (const auto t : central.tie) ties += t;
  log(ctx, "ensemble", std::to_string(central.models) + " models, " + std::to_string(central.size()) +
                           " points, k = " + std::to_string(central.k) + ", " + std::to_string(ties) +
                           " tied points");
  for (std::size_t m = 0; m < central.aligned.size(); ++m) {
    std::size_t moved = 0;
    for (std::size_t i = 0; i < central.size(); ++i)
      moved += central.aligned[m].labels[i] != central.modal_cluster[i] ? 1 : 0;
    ctx.out << fs::path(files[m]).filename().string() << ": " << moved
            << " points off the central partition\n";
  }

  OutputStage stage;
  for (const auto& f : files) stage.add_input(f);
  json config = {{"command", "ensemble"},
                 {"partitions", files},
                 {"alignment", reference ? "fixed reference" : "running consensus"},
                 {"output", o.output}};
  if (reference) {
    stage.add_input(o.reference);
    config["reference"] = o.reference;
  }
  stage.add_output(o.output, render([&](std::ostream& s) { write_central_csv(s, central); }));
  if (!o.geojson.empty()) {
    stage.add_input(o.input);
    const Coordinates coords(load_dataset(o.input));
    json features = json::array();
    for (std::size_t i = 0; i < central.size(); ++i)
      features.push_back(point_feature(coords, central.point_ids[i],
                                       {{"cluster", central.modal_cluster[i]},
                                        {"probability", central.probability[i]},
                                        {"tie", central.tie[i] != 0}}));
    stage.add_output(o.geojson,
                           json{{"type", "FeatureCollection"}, {"features", features}}.dump() + "\n");
    config["geojson"] = o.geojson;
    config["input"] = o.input;
  }
  stage.commit(manifest_for(o.output), config);
}

void run_compare(const CompareOptions& o, Context& ctx) {
  require_geojson_input(o.geojson, o.input);
  check_output_paths({o.output, o.geojson});

  const CentralPartition a = load_central(o.a);
  const CentralPartition b = reorder(load_central(o.b), a.point_ids, o.b);
  const ComparisonReport r = compare_central(a, b);
  log(ctx, "compare", std::to_string(r.changed_count()) + " of " + std::to_string(r.changed.size()) +
                          " points changed cluster; factual relabelling " +
                          reference_to_target_cycles(r.permutation));
  ctx.out << "cluster,gained,lost,mean_probability_delta\n";
  for (std::size_t c = 0; c < r.k; ++c)
    ctx.out << c << ',' << r.clusters[c].gained << ',' << r.clusters[c].lost << ','
            << fmt(r.clusters[c].mean_probability_delta) << '\n';

  OutputStage stage;
  stage.add_input(o.a);
  stage.add_input(o.b);
  json config = {{"command", "compare"}, {"a", o.a}, {"b", o.b}, {"output", o.output}};
  stage.add_output(o.output, render([&](std::ostream& s) { write_changes_csv(s, r); }));
  if (!o.geojson.empty()) {
    stage.add_input(o.input);
    const Coordinates coords(load_dataset(o.input));
    json features = json::array();
    for (std::size_t i = 0; i < r.changed.size(); ++i) {
      const int aligned = r.permutation[static_cast<std::size_t>(b.modal_cluster[i])];
      features.push_back(point_feature(coords, r.point_ids[i],
                                       {{"cluster", aligned},
                                        {"probability", b.probability[i]},
                                        {"cluster_a", a.modal_cluster[i]},
                                        {"probability_a", a.probability[i]},
                                        {"changed", r.changed[i] != 0}}));
    }
    stage.add_output(o.geojson,
                           json{{"type", "FeatureCollection"}, {"features", features}}.dump() + "\n");
    config["geojson"] = o.geojson;
    config["input"] = o.input;
  }
  stage.commit(manifest_for(o.output), config);
}

void run_shuffle_test(const ShuffleOptions& o, Context& ctx) {
  const CStarConfig cfg = o.cstar.config();
  if (o.k < 1) throw UsageError("--k must be >= 1");
  check_output_paths({o.output});

  const Dataset d = select_hemisphere(load_dataset(o.input), o.hemisphere);
  const AblationReport r = shuffle_ablation(d, o.k, o.seed, cfg, ctx.threads);
  log(ctx, "shuffle-test", "original cost " + fmt(r.original.total_cost) + ", shuffled cost " +
                               fmt(r.shuffled.total_cost));
  ctx.out << "fraction_original_lower," << fmt(r.fraction_original_lower) << '\n';

  OutputStage stage;
  stage.add_input(o.input);
  stage.add_output(o.output, render([&](std::ostream& s) { write_ablation_csv(s, r); }));
  stage.commit(manifest_for(o.output),
                     {{"command", "shuffle-test"},
                      {"input", o.input},
                      {"hemisphere", o.hemisphere},
                      {"k", o.k},
                      {"seed", o.seed},
                      {"streams", {{"shuffle", "SplitMix64(derive_seed(seed, point_id)) per point"}}},
                      {"output", o.output},
                      {"cstar", cstar_json(o.cstar)},
                      {"fraction_original_lower", r.fraction_original_lower}});
}

namespace {

SimGridSpec parse_sim_spec(const json& j) {
  SimGridSpec spec;
  spec.years = j.at("years").get<std::size_t>();
  spec.first_year = j.value("first_year", 1);
  for (const auto& c : j.at("clusters")) {
    SimCluster cl;
    cl.cluster_id = c.at("id").get<std::string>();
    cl.alpha = c.at("alpha").get<double>();
    cl.margin.sigma = c.value("sigma", 1.0);
    cl.margin.xi = c.value("xi", 0.1);
    for (const auto& p : c.at("points")) {
      SimPoint pt;
      pt.point_id = p.at("id").get<std::string>();
      pt.lat = p.at("lat").get<double>();
      pt.lon = p.at("lon").get<double>();
      pt.scale = p.value("scale", 1.0);
      cl.points.push_back(std::move(pt));
    }
    spec.clusters.push_back(std::move(cl));
  }
  return spec;
}

}  // namespace

void run_simulate(const SimulateOptions& o, Context& ctx) {
  check_output_paths({o.output});

  std::ifstream in(o.spec, std::ios::binary);
  if (!in) throw DataError("cannot open '" + o.spec + "'");
  SimGridSpec spec;
  try {
    spec = parse_sim_spec(json::parse(in));
    spec.validate();
  } catch (const json::exception& e) {
    throw DataError(o.spec + ": " + e.what());
  } catch (const DomainError& e) {
    throw DataError(o.spec + ": " + e.what());
  }
  const Dataset d = sample_grid(spec, o.seed, fs::path(o.spec).stem().string());
  log(ctx, "simulate", std::to_string(d.size()) + " points x " + std::to_string(d.series_length()) +
                           " years from " + std::to_string(spec.clusters.size()) + " clusters");

  OutputStage stage;
  stage.add_input(o.spec);
  stage.add_output(o.output, render([&](std::ostream& s) { write_dataset_csv(s, d); }));
  stage.commit(manifest_for(o.output),
                     {{"command", "simulate"},
                      {"spec", o.spec},
                      {"seed", o.seed},
                      {"streams",
                       {{"cluster_frailty", "SplitMix64(derive_seed(seed, \"cluster:\" + cluster_id))"},
                        {"point", "SplitMix64(derive_seed(seed, point_id))"}}},
                      {"output", o.output}});
}

void run_theory_surface(const SurfaceOptions& o, Context& ctx) {
  const auto alphas = parse_grid(o.alphas);
  const auto ratios = parse_grid(o.ratios);
  for (const double a : alphas)
    if (!(a > 0.0 && a <= 1.0)) throw UsageError("--alphas must lie in (0, 1]");
  for (const double r : ratios)
    if (!(r > 0.0)) throw UsageError("--ratios must be positive");
  if (!(o.xi2 > 0.0)) throw UsageError("--xi2 must be positive");
  QuadratureConfig quad;
  quad.abs_tol = o.abs_tol;
  quad.max_subdivisions = o.max_subdivisions;
  try {
    quad.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  check_output_paths({o.output});

  const auto cells = optimal_dissimilarity_surface(alphas, ratios, o.xi2, quad, ctx.threads);
  log(ctx, "theory-surface", std::to_string(cells.size()) + " cells");

  OutputStage stage;
  stage.add_output(o.output, render([&](std::ostream& s) { write_surface_csv(s, cells); }));
  stage.commit(manifest_for(o.output), {{"command", "theory-surface"},
                                              {"alphas", o.alphas},
                                              {"ratios", o.ratios},
                                              {"xi2", o.xi2},
                                              {"abs_tol", o.abs_tol},
                                              {"max_subdivisions", o.max_subdivisions},
                                              {"output", o.output},});
}

void run_pipeline(const PipelineOptions& o, Context& ctx) {
  const CStarConfig cfg = o.cstar.config();
  if (o.k < 1) throw UsageError("--k must be >= 1");
  const fs::path dir(o.output_dir);
  if (fs::exists(dir) && !fs::is_directory(dir))
    throw UsageError("--output-dir '" + o.output_dir + "' is not a directory");
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw UsageError("parent of --output-dir does not exist");

  const Dataset all = load_dataset(o.input);
  auto [north, south] = split_hemispheres(all);
  log(ctx, "pipeline", std::to_string(north.size()) + " northern and " + std::to_string(south.size()) +
                           " southern points, n = " + std::to_string(all.series_length()));

  OutputStage stage;
  stage.add_input(o.input);
  json summary = json::object();
  for (const auto& [name, part] : {std::pair<std::string, const Dataset*>{"north", &north},
                                   std::pair<std::string, const Dataset*>{"south", &south}}) {
    if (part->empty()) {
      log(ctx, "pipeline", name + ": no points, skipped");
      continue;
    }
    if (part->size() < o.k)
      throw DataError(name + "ern hemisphere has " + std::to_string(part->size()) + " points, fewer than k = " +
                      std::to_string(o.k));
    const auto m = dissimilarity_matrix(*part, cfg, ctx.threads);
    log(ctx, "pipeline", name + ": dissimilarity matrix done");
    const Partition p = pam(m, o.k, ctx.threads);
    json info = {{"points", part->size()}, {"total_cost", p.total_cost}};
    std::string msg = name + ": PAM cost " + fmt(p.total_cost);
    if (o.k >= 2) {
      const double s = silhouette(m.d_rfa, p);
      info["silhouette"] = s;
      msg += ", silhouette " + fmt(s);
    }
    log(ctx, "pipeline", msg);
    summary[name] = std::move(info);
    stage.add_output(dir / (name + "_dissim.csv"),
                           render([&](std::ostream& s) { write_dissimilarity_csv(s, m); }));
    stage.add_output(dir / (name + "_partition.csv"),
                           render([&](std::ostream& s) { write_partition_csv(s, p); }));
  }
  stage.commit(dir / "manifest.json", {{"command", "pipeline"},
                                             {"input", o.input},
                                             {"output_dir", o.output_dir},
                                             {"k", o.k},
                                             {"cstar", cstar_json(o.cstar)},
                                             {"hemispheres", summary}});
}

}  // namespace rfamado::cli
