#include "covplan/mem_router.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <unordered_map>

#include "covplan/errors.hpp"

namespace covplan {

namespace {

constexpr double kSavingsTol = 1e-12;
constexpr double kTurnEps = std::numbers::pi / 180.0;  // 1 degree

int service_start(const GraphEdge& e, bool forward) { return forward ? e.u : e.v; }
int service_end(const GraphEdge& e, bool forward) { return forward ? e.v : e.u; }
double service_cost(const GraphEdge& e, bool forward) {
  return forward ? e.values.cost_fwd : e.values.cost_rev;
}
double service_demand(const GraphEdge& e, bool forward) {
  return forward ? e.values.demand_fwd : e.values.demand_rev;
}

struct ChainValues {
  double cost = 0, demand = 0;
};

// Deadhead leg values with an optional flat matrix over the router's source
// vertices; the table rows involve several dependent loads, which dominates the
// savings evaluation on large instances.
class LegTable {
 public:
  explicit LegTable(const DeadheadPathTable& table) : table_(&table) {}

  LegTable(const CoverageGraph& g, const DeadheadPathTable& table) : table_(&table) {
    std::vector<int> sources{g.depot};
    for (const GraphEdge& e : g.required) {
      sources.push_back(e.u);
      sources.push_back(e.v);
    }
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    sidx_.assign(g.vertices.size(), -1);
    for (std::size_t i = 0; i < sources.size(); ++i)
      sidx_[static_cast<std::size_t>(sources[i])] = static_cast<int>(i);
    count_ = sources.size();
    cd_.resize(2 * count_ * count_);
    for (std::size_t a = 0; a < count_; ++a) {
      for (std::size_t b = 0; b < count_; ++b) {
        cd_[2 * (a * count_ + b)] = table.cost(sources[a], sources[b]);
        cd_[2 * (a * count_ + b) + 1] = table.demand(sources[a], sources[b]);
      }
    }
    dense_ = true;
  }

  std::pair<double, double> leg(int u, int v) const {
    if (dense_) {
      const std::size_t a = static_cast<std::size_t>(sidx_[static_cast<std::size_t>(u)]);
      const std::size_t b = static_cast<std::size_t>(sidx_[static_cast<std::size_t>(v)]);
      const double* p = &cd_[2 * (a * count_ + b)];
      return {p[0], p[1]};
    }
    return {table_->cost(u, v), table_->demand(u, v)};
  }

 private:
  const DeadheadPathTable* table_;
  bool dense_ = false;
  std::size_t count_ = 0;
  std::vector<int> sidx_;
  std::vector<double> cd_;
};

// Cost/demand of depot -> services -> depot with implied deadhead connections.
ChainValues chain_values(const std::vector<DirectedService>& services, const CoverageGraph& g,
                         const LegTable& legs) {
  ChainValues out;
  int cur = g.depot;
  for (const DirectedService& s : services) {
    const GraphEdge& e = g.required[static_cast<std::size_t>(s.edge)];
    const auto [c, d] = legs.leg(cur, service_start(e, s.forward));
    out.cost += c + service_cost(e, s.forward);
    out.demand += d + service_demand(e, s.forward);
    cur = service_end(e, s.forward);
  }
  const auto [c, d] = legs.leg(cur, g.depot);
  out.cost += c;
  out.demand += d;
  return out;
}

std::vector<DirectedService> oriented_services(const SeqRoute& r, bool reversed) {
  if (!reversed) return r.services;
  std::vector<DirectedService> out(r.services.rbegin(), r.services.rend());
  for (DirectedService& s : out) s.forward = !s.forward;
  return out;
}

// Terminals, depot legs and depot-free internals of a route in one orientation.
struct Oriented {
  int first = -1, last = -1;
  double internal_cost = 0, internal_demand = 0;
  double depot_in_cost = 0, depot_in_demand = 0;    // depot -> first
  double depot_out_cost = 0, depot_out_demand = 0;  // last -> depot
};

Oriented orient(const SeqRoute& r, bool reversed, const CoverageGraph& g, const LegTable& legs) {
  Oriented o;
  const auto services = oriented_services(r, reversed);
  int cur = -1;
  for (const DirectedService& s : services) {
    const GraphEdge& e = g.required[static_cast<std::size_t>(s.edge)];
    const int start = service_start(e, s.forward);
    if (cur < 0) {
      o.first = start;
    } else {
      const auto [c, d] = legs.leg(cur, start);
      o.internal_cost += c;
      o.internal_demand += d;
    }
    o.internal_cost += service_cost(e, s.forward);
    o.internal_demand += service_demand(e, s.forward);
    cur = service_end(e, s.forward);
  }
  o.last = cur;
  std::tie(o.depot_in_cost, o.depot_in_demand) = legs.leg(g.depot, o.first);
  std::tie(o.depot_out_cost, o.depot_out_demand) = legs.leg(o.last, g.depot);
  return o;
}

struct OrientedPair {
  Oriented fwd, rev;
};

std::optional<SavingsEntry> best_merge(const SeqRoute& a, const SeqRoute& b,
                                       const OrientedPair& oa, const OrientedPair& ob,
                                       const LegTable& legs, double capacity) {
  std::optional<SavingsEntry> best;
  for (int config = 0; config < 8; ++config) {
    const bool b_first = config & 1;
    const Oriented& x = b_first ? ((config & 4) ? ob.rev : ob.fwd) : ((config & 2) ? oa.rev : oa.fwd);
    const Oriented& y = b_first ? ((config & 2) ? oa.rev : oa.fwd) : ((config & 4) ? ob.rev : ob.fwd);
    const auto [leg_c, leg_d] = legs.leg(x.last, y.first);
    const double cost = x.depot_in_cost + x.internal_cost + leg_c + y.internal_cost + y.depot_out_cost;
    const double demand =
        x.depot_in_demand + x.internal_demand + leg_d + y.internal_demand + y.depot_out_demand;
    if (demand > capacity) continue;
    const double savings = a.cost + b.cost - cost;
    if (savings <= kSavingsTol) continue;
    const bool better = !best || savings > best->savings + kSavingsTol ||
                        (std::abs(savings - best->savings) <= kSavingsTol &&
                         demand < best->merged_demand - kSavingsTol);
    if (better) best = SavingsEntry{-1, -1, config, savings, demand};
  }
  return best;
}

SeqRoute apply_merge(const SeqRoute& a, const SeqRoute& b, int config, const CoverageGraph& g,
                     const LegTable& legs) {
  const bool b_first = config & 1;
  auto first = oriented_services(b_first ? b : a, b_first ? (config & 4) : (config & 2));
  auto second = oriented_services(b_first ? a : b, b_first ? (config & 2) : (config & 4));
  SeqRoute merged;
  merged.services = std::move(first);
  merged.services.insert(merged.services.end(), second.begin(), second.end());
  const ChainValues cv = chain_values(merged.services, g, legs);
  merged.cost = cv.cost;
  merged.demand = cv.demand;
  return merged;
}

}  // namespace

std::vector<SeqRoute> init_routes(const CoverageGraph& g, const DeadheadPathTable& table) {
  const LegTable legs(table);
  std::vector<SeqRoute> out;
  out.reserve(g.required.size());
  for (std::size_t e = 0; e < g.required.size(); ++e) {
    SeqRoute best;
    bool found = false;
    for (bool forward : {true, false}) {
      SeqRoute r;
      r.services = {{static_cast<int>(e), forward}};
      const ChainValues cv = chain_values(r.services, g, legs);
      r.cost = cv.cost;
      r.demand = cv.demand;
      if (r.demand > g.capacity) continue;
      if (!found || r.cost < best.cost - kSavingsTol) {
        best = std::move(r);
        found = true;
      }
    }
    if (!found)
      throw InfeasibleEdge("required edge " + std::to_string(e) +
                           " cannot be serviced within capacity");
    out.push_back(std::move(best));
  }
  return out;
}

std::optional<SavingsEntry> merge_candidates(const SeqRoute& a, const SeqRoute& b,
                                             const CoverageGraph& g, const DeadheadPathTable& table,
                                             double capacity) {
  const LegTable legs(table);
  const OrientedPair oa{orient(a, false, g, legs), orient(a, true, g, legs)};
  const OrientedPair ob{orient(b, false, g, legs), orient(b, true, g, legs)};
  return best_merge(a, b, oa, ob, legs, capacity);
}

namespace {

// Directed arc lookup mirroring the relaxation order used by the table.
class ArcLookup {
 public:
  explicit ArcLookup(const CoverageGraph& g) : n_(static_cast<long long>(g.vertices.size())) {
    arcs_.reserve(2 * g.deadhead.size());
    for (const GraphEdge& e : g.deadhead) {
      put(e.u, e.v, e.values.cost_fwd, e.values.demand_fwd);
      put(e.v, e.u, e.values.cost_rev, e.values.demand_rev);
    }
  }
  std::pair<double, double> at(int u, int v) const {
    return arcs_.at(static_cast<long long>(u) * n_ + v);
  }

 private:
  void put(int u, int v, double c, double d) {
    const long long key = static_cast<long long>(u) * n_ + v;
    auto it = arcs_.find(key);
    if (it == arcs_.end() || c < it->second.first) arcs_[key] = {c, d};
  }
  long long n_;
  std::unordered_map<long long, std::pair<double, double>> arcs_;
};

Route expand_with(const SeqRoute& r, const CoverageGraph& g, const DeadheadPathTable& table,
                  const ArcLookup& arcs) {
  Route out;
  auto add_deadheads = [&](int from, int to) {
    if (from == to) return;
    const std::vector<int> path = table.path(from, to);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const auto [c, d] = arcs.at(path[i], path[i + 1]);
      RouteStep step;
      step.mode = StepMode::deadhead;
      step.from = path[i];
      step.to = path[i + 1];
      step.from_pt = g.vertices[static_cast<std::size_t>(path[i])];
      step.to_pt = g.vertices[static_cast<std::size_t>(path[i + 1])];
      step.cost = c;
      step.demand = d;
      out.steps.push_back(step);
    }
  };

  int cur = g.depot;
  for (const DirectedService& s : r.services) {
    const GraphEdge& e = g.required[static_cast<std::size_t>(s.edge)];
    const int start = service_start(e, s.forward);
    const int end = service_end(e, s.forward);
    add_deadheads(cur, start);
    RouteStep step;
    step.mode = StepMode::service;
    step.from = start;
    step.to = end;
    step.from_pt = g.vertices[static_cast<std::size_t>(start)];
    step.to_pt = g.vertices[static_cast<std::size_t>(end)];
    step.required_edge = s.edge;
    step.cost = service_cost(e, s.forward);
    step.demand = service_demand(e, s.forward);
    out.steps.push_back(step);
    cur = end;
  }
  add_deadheads(cur, g.depot);

  for (const RouteStep& s : out.steps) {
    out.total_cost += s.cost;
    out.total_demand += s.demand;
  }
  out.turns = count_turns(out);
  return out;
}

Solution build_solution(const std::vector<SeqRoute>& routes, const CoverageGraph& g,
                        const DeadheadPathTable& table) {
  Solution sol;
  const ArcLookup arcs(g);
  for (const SeqRoute& r : routes) {
    if (!r.valid) continue;
    Route route = expand_with(r, g, table, arcs);
    sol.total_cost += route.total_cost;
    sol.total_demand += route.total_demand;
    sol.total_turns += route.turns;
    sol.routes.push_back(std::move(route));
  }
  return sol;
}

}  // namespace

Route expand_route(const SeqRoute& r, const CoverageGraph& g, const DeadheadPathTable& table) {
  return expand_with(r, g, table, ArcLookup(g));
}

namespace {

struct HeapEntry {
  double savings, merged_demand;
  int i, j, config;
};

// better(a, b): a pops before b. Total order, so the merge sequence is
// deterministic regardless of heap internals.
inline bool better(const HeapEntry& a, const HeapEntry& b) {
  if (a.savings != b.savings) return a.savings > b.savings;
  if (a.merged_demand != b.merged_demand) return a.merged_demand < b.merged_demand;
  if (a.i != b.i) return a.i < b.i;
  if (a.j != b.j) return a.j < b.j;
  return a.config < b.config;
}

// 4-ary max-heap: half the levels of a binary heap, which matters once the
// entry array outgrows the cache.
class SavingsHeap {
 public:
  void reserve(std::size_t n) { v_.reserve(n); }
  bool empty() const { return v_.empty(); }
  const HeapEntry& top() const { return v_.front(); }

  void push(const HeapEntry& e) {
    v_.push_back(e);
    std::size_t c = v_.size() - 1;
    while (c > 0) {
      const std::size_t p = (c - 1) / 4;
      if (!better(v_[c], v_[p])) break;
      std::swap(v_[c], v_[p]);
      c = p;
    }
  }

  void pop() {
    v_.front() = v_.back();
    v_.pop_back();
    std::size_t p = 0;
    while (true) {
      const std::size_t first = 4 * p + 1;
      if (first >= v_.size()) break;
      std::size_t best = first;
      const std::size_t last = std::min(first + 4, v_.size());
      for (std::size_t c = first + 1; c < last; ++c) {
        if (better(v_[c], v_[best])) best = c;
      }
      if (!better(v_[best], v_[p])) break;
      std::swap(v_[p], v_[best]);
      p = best;
    }
  }

 private:
  std::vector<HeapEntry> v_;
};

}  // namespace

Solution mem_solve(const CoverageGraph& g, const DeadheadPathTable& table, MemTrace* trace) {
  const LegTable legs(g, table);
  std::vector<SeqRoute> routes = init_routes(g, table);
  std::vector<OrientedPair> cache;
  cache.reserve(routes.size());
  for (const SeqRoute& r : routes) cache.push_back({orient(r, false, g, legs), orient(r, true, g, legs)});

  SavingsHeap heap;
  heap.reserve(routes.size() * routes.size() + 16);

  auto push_pair = [&](int i, int j) {
    auto entry = best_merge(routes[static_cast<std::size_t>(i)], routes[static_cast<std::size_t>(j)],
                            cache[static_cast<std::size_t>(i)], cache[static_cast<std::size_t>(j)],
                            legs, g.capacity);
    if (entry) heap.push({entry->savings, entry->merged_demand, i, j, entry->config});
  };
  for (std::size_t i = 0; i < routes.size(); ++i)
    for (std::size_t j = i + 1; j < routes.size(); ++j)
      push_pair(static_cast<int>(i), static_cast<int>(j));

  std::vector<double> committed;
  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    SeqRoute& ri = routes[static_cast<std::size_t>(top.i)];
    SeqRoute& rj = routes[static_cast<std::size_t>(top.j)];
    if (!ri.valid || !rj.valid) {
      if (trace) ++trace->stale_skips;
      continue;
    }
    // routes are immutable once created, so the entry should still be exact
    auto fresh = best_merge(ri, rj, cache[static_cast<std::size_t>(top.i)],
                            cache[static_cast<std::size_t>(top.j)], legs, g.capacity);
    if (!fresh) {
      if (trace) ++trace->revalidation_mismatches;
      continue;
    }
    if (trace && std::abs(fresh->savings - top.savings) > 1e-9 * std::max(1.0, top.savings))
      ++trace->revalidation_mismatches;

    SeqRoute merged = apply_merge(ri, rj, fresh->config, g, legs);
    ri.valid = false;
    rj.valid = false;
    committed.push_back(fresh->savings);

    const int new_id = static_cast<int>(routes.size());
    routes.push_back(std::move(merged));
    cache.push_back({orient(routes.back(), false, g, legs), orient(routes.back(), true, g, legs)});
    for (int k = 0; k < new_id; ++k) {
      if (routes[static_cast<std::size_t>(k)].valid) push_pair(k, new_id);
    }
  }

  Solution sol = build_solution(routes, g, table);
  sol.merge_savings = committed;
  if (trace) trace->committed_savings = committed;
  return sol;
}

Solution mem_solve(const CoverageGraph& g) {
  const DeadheadPathTable table = DeadheadPathTable::build(g);
  return mem_solve(g, table);
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

Solution brute_force_oracle(const CoverageGraph& g, const DeadheadPathTable& table) {
  const std::size_t m = g.required.size();
  if (m > 5) throw TooLarge("oracle handles at most 5 required edges");
  if (m == 0) return Solution{};
  const LegTable legs(table);

  // best feasible arrangement of one block: all orders x all direction masks
  auto best_block = [&](const std::vector<int>& edges) -> std::optional<SeqRoute> {
    std::vector<int> perm = edges;
    std::sort(perm.begin(), perm.end());
    std::optional<SeqRoute> best;
    do {
      const std::size_t k = perm.size();
      for (std::size_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<DirectedService> services;
        services.reserve(k);
        for (std::size_t i = 0; i < k; ++i)
          services.push_back({perm[i], (mask >> i & 1u) == 0});
        const ChainValues cv = chain_values(services, g, legs);
        if (cv.demand > g.capacity) continue;
        if (!best || cv.cost < best->cost) {
          best = SeqRoute{std::move(services), cv.cost, cv.demand, true};
        }
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  };

  // enumerate set partitions with restricted growth strings
  std::vector<int> assign(m, 0);
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<SeqRoute> best_routes;
  auto consider = [&]() {
    const int blocks = 1 + *std::max_element(assign.begin(), assign.end());
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(blocks));
    for (std::size_t e = 0; e < m; ++e)
      groups[static_cast<std::size_t>(assign[e])].push_back(static_cast<int>(e));
    double total = 0;
    std::vector<SeqRoute> routes;
    for (const auto& grp : groups) {
      auto r = best_block(grp);
      if (!r) return;
      total += r->cost;
      routes.push_back(std::move(*r));
    }
    if (total < best_total) {
      best_total = total;
      best_routes = std::move(routes);
    }
  };
  // iterate restricted growth strings: assign[i] <= 1 + max(assign[0..i-1])
  while (true) {
    consider();
    std::size_t i = m;
    while (--i > 0) {
      int prefix_max = 0;
      for (std::size_t k = 0; k < i; ++k) prefix_max = std::max(prefix_max, assign[k]);
      if (assign[i] <= prefix_max) break;
    }
    if (i == 0) break;
    ++assign[i];
    for (std::size_t k = i + 1; k < m; ++k) assign[k] = 0;
  }
  if (best_routes.empty()) throw Infeasible("no capacity-feasible solution exists");
  return build_solution(best_routes, g, table);
}

int count_turns(const Route& route) {
  std::vector<Point> dirs;
  for (const RouteStep& s : route.steps) {
    const Point d = s.to_pt - s.from_pt;
    if (norm(d) <= kEpsGeom) continue;
    dirs.push_back({d.x / norm(d), d.y / norm(d)});
  }
  int turns = 0;
  for (std::size_t i = 0; i + 1 < dirs.size(); ++i) {
    const double ang = std::atan2(std::abs(cross(dirs[i], dirs[i + 1])), dot(dirs[i], dirs[i + 1]));
    if (ang > kTurnEps) ++turns;
  }
  return turns;
}

int count_turns(const Solution& sol) {
  int total = 0;
  for (const Route& r : sol.routes) total += count_turns(r);
  return total;
}

}  // namespace covplan
