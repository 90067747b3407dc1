#pragma once

#include <limits>
#include <string>
#include <vector>

#include "covplan/cost_models.hpp"
#include "covplan/geometry.hpp"
#include "covplan/track_gen.hpp"

namespace covplan {

inline constexpr double kInfiniteCapacity = std::numeric_limits<double>::infinity();

struct GraphEdge {
  int u = -1, v = -1;
  EdgeValues values;
};

// Line-coverage instance: required edges must each be serviced exactly once;
// deadhead edges are optional connectors.
struct CoverageGraph {
  std::vector<Point> vertices;
  int depot = 0;
  std::vector<GraphEdge> required;
  std::vector<GraphEdge> deadhead;
  double capacity = kInfiniteCapacity;
};

// Deduplicated union of track endpoints, environment vertices and the depot.
// Throws InvalidDepot when the depot is outside the free workspace closure.
std::vector<Point> build_vertices(const PolygonWithHoles& env,
                                  const std::vector<ServiceTrack>& tracks, Point depot,
                                  int* depot_id);

// Deadhead edges between every pair of mutually visible vertices.
std::vector<GraphEdge> visibility_edges(const PolygonWithHoles& env,
                                        const std::vector<Point>& vertices, bool fly_over_holes,
                                        const CostModel& model);

// Required edges for the tracks (service values) plus deadhead twins so a robot
// may traverse a track without servicing it.
struct RequiredBuild {
  std::vector<GraphEdge> required;
  std::vector<GraphEdge> deadhead_twins;
};
RequiredBuild require_tracks(const std::vector<ServiceTrack>& tracks,
                             const std::vector<Point>& vertices, const CostModel& model);

CoverageGraph build_coverage_graph(const PolygonWithHoles& env,
                                   const std::vector<ServiceTrack>& tracks, Point depot,
                                   const CostModel& model, double capacity, bool fly_over_holes,
                                   bool tracks_deadheadable = true);

// Min-cost deadhead paths from the depot and every required-edge endpoint (the
// sources the router consults); demands accumulate along the chosen path.
class DeadheadPathTable {
 public:
  static DeadheadPathTable build(const CoverageGraph& g);
  static DeadheadPathTable build_all_sources(const CoverageGraph& g);

  double cost(int from, int to) const { return row(from).cost[static_cast<std::size_t>(to)]; }
  double demand(int from, int to) const { return row(from).demand[static_cast<std::size_t>(to)]; }
  std::vector<int> path(int from, int to) const;  // vertex ids, from .. to
  bool has_row(int from) const {
    return from >= 0 && static_cast<std::size_t>(from) < row_index_.size() &&
           row_index_[static_cast<std::size_t>(from)] >= 0;
  }

 private:
  struct Row {
    std::vector<double> cost, demand;
    std::vector<int> parent;
  };
  static DeadheadPathTable build_rows(const CoverageGraph& g, const std::vector<int>& sources);
  const Row& row(int from) const;
  std::vector<int> row_index_;  // vertex id -> index into rows_, -1 when absent
  std::vector<Row> rows_;
};

// JSON instance schema shared with the standalone `route` subcommand.
std::string instance_to_json(const CoverageGraph& g);
CoverageGraph instance_from_json(const std::string& text);
void save_instance(const CoverageGraph& g, const std::string& path);
CoverageGraph load_instance(const std::string& path);

}  // namespace covplan
