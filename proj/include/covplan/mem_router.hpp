#pragma once

#include <optional>
#include <vector>

#include "covplan/coverage_graph.hpp"

namespace covplan {

enum class StepMode { service, deadhead };

struct RouteStep {
  StepMode mode = StepMode::deadhead;
  int from = -1, to = -1;
  Point from_pt, to_pt;
  int required_edge = -1;  // set on service steps
  double cost = 0, demand = 0;
};

struct Route {
  std::vector<RouteStep> steps;
  double total_cost = 0;
  double total_demand = 0;
  int turns = 0;
};

struct Solution {
  std::vector<Route> routes;
  double total_cost = 0;
  double total_demand = 0;
  int total_turns = 0;
  std::vector<double> merge_savings;  // committed merges, in order
};

// A route as the ordered list of serviced required edges; depot legs and the
// deadheads between services are implied min-cost paths.
struct DirectedService {
  int edge = -1;
  bool forward = true;
};

struct SeqRoute {
  std::vector<DirectedService> services;
  double cost = 0;
  double demand = 0;
  bool valid = true;
};

struct SavingsEntry {
  int route_i = -1, route_j = -1;
  int config = 0;  // bit0: j first, bit1: reverse i, bit2: reverse j
  double savings = 0;
  double merged_demand = 0;
};

// One route per required edge, cheaper service direction first.
// Throws InfeasibleEdge when a single-edge route already exceeds capacity.
std::vector<SeqRoute> init_routes(const CoverageGraph& g, const DeadheadPathTable& table);

// Best of the eight merge configurations with positive savings that fits the
// capacity; nullopt when none qualifies.
std::optional<SavingsEntry> merge_candidates(const SeqRoute& a, const SeqRoute& b,
                                             const CoverageGraph& g, const DeadheadPathTable& table,
                                             double capacity);

struct MemTrace {
  std::vector<double> committed_savings;
  std::size_t stale_skips = 0;
  std::size_t revalidation_mismatches = 0;
};

Solution mem_solve(const CoverageGraph& g, const DeadheadPathTable& table,
                   MemTrace* trace = nullptr);
Solution mem_solve(const CoverageGraph& g);

// Exact optimum by exhaustive enumeration; throws TooLarge above 5 required edges
// and Infeasible when no capacity-feasible solution exists.
Solution brute_force_oracle(const CoverageGraph& g, const DeadheadPathTable& table);

// Interior vertices where consecutive step directions differ by more than 1 degree.
int count_turns(const Route& route);
int count_turns(const Solution& sol);

Route expand_route(const SeqRoute& r, const CoverageGraph& g, const DeadheadPathTable& table);

}  // namespace covplan
