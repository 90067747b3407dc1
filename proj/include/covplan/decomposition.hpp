#pragma once

#include <utility>
#include <vector>

#include "covplan/geometry.hpp"

namespace covplan {

// Angular tolerance for treating two service directions as mergeable.
inline constexpr double kMergeAngEps = 1e-3;

struct Cell {
  PolygonWithHoles shape;
  Direction service_direction;
  double msa = 0.0;  // altitude along service_direction
};

struct Decomposition {
  std::vector<Cell> cells;
  Direction sweep_direction;
  double total_msa = 0.0;
};

// One direction per distinct edge orientation (outer + holes), sorted ascending.
std::vector<Direction> candidate_directions(const PolygonWithHoles& poly);

// Sweep integral of the slice-component count perpendicular to dir. Equals the
// perpendicular extent for polygons monotone w.r.t. dir.
double altitude(const PolygonWithHoles& poly, Direction dir);

// Minimal altitude over the polygon's own edge orientations; ties -> smallest angle.
std::pair<Direction, double> msa_of(const PolygonWithHoles& poly);

// Boustrophedon decomposition sweeping perpendicular to dir. Output cells are
// monotone w.r.t. the sweep and carry their own msa_of annotation.
Decomposition bcd(const PolygonWithHoles& env, Direction dir);

// Best bcd over all candidate directions of the environment.
Decomposition initial_decomposition(const PolygonWithHoles& env);

// Recursive reflex-vertex splitting; commits only strictly MSA-improving cuts.
std::vector<Cell> greedy_split(const Cell& cell);

// Fixpoint merging of adjacent cells with near-equal service directions.
std::vector<Cell> merge_cells(std::vector<Cell> cells);

struct DecompositionPipeline {
  Decomposition initial;
  std::vector<Cell> after_split;
  std::vector<Cell> after_merge;
};

DecompositionPipeline run_decomposition(const PolygonWithHoles& env);

inline double total_msa(const std::vector<Cell>& cells) {
  double t = 0;
  for (const Cell& c : cells) t += c.msa;
  return t;
}

inline double total_area(const std::vector<Cell>& cells) {
  double t = 0;
  for (const Cell& c : cells) t += c.shape.area();
  return t;
}

}  // namespace covplan
