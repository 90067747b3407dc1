#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covplan/coverage_graph.hpp"
#include "covplan/decomposition.hpp"
#include "covplan/mem_router.hpp"
#include "covplan/track_gen.hpp"

namespace covplan {

struct PlanConfig {
  std::string env_path;
  Point depot;
  double capacity = kInfiniteCapacity;
  double fov = 1.0;
  CostKind cost_kind = CostKind::length;
  double v_max = 3.0;
  double a_max = 1.0;
  double service_speed = 1.0;
  double deadhead_speed = 1.0;
  double wind_speed = 0.0;
  double wind_from_deg = 0.0;
  bool fly_over_holes = false;
  bool include_boundary = false;
  std::string out_geojson;
  std::string out_svg;
  std::string out_report;
  bool no_timings = false;
  std::uint64_t seed = 0;

  CostModel cost_model() const;
  void validate() const;  // throws ConfigError
};

struct StageTimings {
  double decomposition_s = 0;
  double tracks_s = 0;
  double graph_s = 0;
  double routing_s = 0;
  double total_s = 0;
};

struct PlanReport {
  std::size_t cell_count = 0;
  std::size_t track_count = 0;
  std::size_t vertex_count = 0;
  std::vector<Route> routes;  // shared with the Solution
  double total_cost = 0;
  double total_demand = 0;
  double total_length_m = 0;  // geometric length of all traversed steps
  double service_length_m = 0;
  int total_turns = 0;
  StageTimings timings;
};

struct PlanResult {
  PolygonWithHoles env;
  std::vector<Cell> cells;
  std::vector<ServiceTrack> tracks;
  Solution solution;
  PlanReport report;
};

// Native JSON ({"outer": [[x,y],...], "holes": [...]}) or a GeoJSON Polygon.
// Ring orientation is auto-repaired; other invalidity throws GeometryError.
PolygonWithHoles load_environment(const std::string& path);
PolygonWithHoles environment_from_json(const std::string& text);
std::string environment_to_json(const PolygonWithHoles& env);

PlanResult plan(const PlanConfig& config);

// plan() on an already-loaded environment (fixtures, batch conversion).
PlanResult plan_environment(const PolygonWithHoles& env, const PlanConfig& config);

std::string report_to_json(const PlanReport& report, bool include_timings);

void emit_geojson(const Solution& sol, const std::string& path);
std::string solution_to_geojson(const Solution& sol);
std::string solution_to_json(const Solution& sol);

void emit_svg(const PolygonWithHoles& env, const std::vector<Cell>& cells,
              const std::vector<ServiceTrack>& tracks, const Solution& sol,
              const std::string& path);
std::string render_svg(const PolygonWithHoles& env, const std::vector<Cell>& cells,
                       const std::vector<ServiceTrack>& tracks, const Solution& sol);

// Plan configuration from a JSON file (the schema convert_dataset emits).
// A missing depot defaults to the environment's first outer vertex.
PlanConfig config_from_json(const std::string& path);

struct BatchResult {
  std::string name;
  bool succeeded = false;
  std::string error;
  PlanReport report;
};

// Runs every *.config.json under config_dir across a worker pool and writes
// per-instance reports into out_dir.
std::vector<BatchResult> run_batch(const std::string& config_dir, const std::string& out_dir,
                                   unsigned jobs);

// Dataset conversion (best effort; see README for the accepted formats).
enum class DatasetKind { indoor25, outdoor300 };
struct ConvertedInstance {
  std::string name;
  std::string env_file;
  std::vector<std::string> config_files;
};
std::vector<ConvertedInstance> convert_dataset(const std::string& input_dir, DatasetKind kind,
                                               const std::string& output_dir);

}  // namespace covplan
