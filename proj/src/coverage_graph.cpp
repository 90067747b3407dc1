#include "covplan/coverage_graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>

#include <json.hpp>

#include "covplan/errors.hpp"

namespace covplan {

std::vector<Point> build_vertices(const PolygonWithHoles& env,
                                  const std::vector<ServiceTrack>& tracks, Point depot,
                                  int* depot_id) {
  if (!in_free_space(env, depot)) throw InvalidDepot("depot lies outside the free workspace");

  std::vector<Point> vertices;
  auto add = [&](Point p) {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (nearly_equal(vertices[i], p)) return static_cast<int>(i);
    vertices.push_back(p);
    return static_cast<int>(vertices.size()) - 1;
  };
  for (const ServiceTrack& t : tracks) {
    add(t.segment.a);
    add(t.segment.b);
  }
  for (const Point& p : env.outer.vertices) add(p);
  for (const Ring& h : env.holes)
    for (const Point& p : h.vertices) add(p);
  const int d = add(depot);
  if (depot_id) *depot_id = d;
  return vertices;
}

std::vector<GraphEdge> visibility_edges(const PolygonWithHoles& env,
                                        const std::vector<Point>& vertices, bool fly_over_holes,
                                        const CostModel& model) {
  std::vector<GraphEdge> out;
  const int n = static_cast<int>(vertices.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Segment s{vertices[static_cast<std::size_t>(i)], vertices[static_cast<std::size_t>(j)]};
      if (s.length() <= kEpsGeom) continue;
      if (!segment_in_free_space(env, s, fly_over_holes)) continue;
      out.push_back({i, j, edge_cost_demand(s, TravelMode::deadhead, model)});
    }
  }
  return out;
}

RequiredBuild require_tracks(const std::vector<ServiceTrack>& tracks,
                             const std::vector<Point>& vertices, const CostModel& model) {
  auto vertex_id = [&](Point p) {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (nearly_equal(vertices[i], p)) return static_cast<int>(i);
    throw GeometryError("track endpoint missing from vertex set");
  };
  RequiredBuild out;
  for (const ServiceTrack& t : tracks) {
    const int u = vertex_id(t.segment.a);
    const int v = vertex_id(t.segment.b);
    if (u == v) continue;
    out.required.push_back({u, v, edge_cost_demand(t.segment, TravelMode::service, model)});
    out.deadhead_twins.push_back({u, v, edge_cost_demand(t.segment, TravelMode::deadhead, model)});
  }
  return out;
}

CoverageGraph build_coverage_graph(const PolygonWithHoles& env,
                                   const std::vector<ServiceTrack>& tracks, Point depot,
                                   const CostModel& model, double capacity, bool fly_over_holes,
                                   bool tracks_deadheadable) {
  CoverageGraph g;
  g.capacity = capacity;
  g.vertices = build_vertices(env, tracks, depot, &g.depot);

  RequiredBuild rb = require_tracks(tracks, g.vertices, model);
  g.required = std::move(rb.required);

  std::set<std::pair<int, int>> present;
  if (tracks_deadheadable) {
    for (GraphEdge& e : rb.deadhead_twins) {
      present.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
      g.deadhead.push_back(std::move(e));
    }
  }
  for (GraphEdge& e : visibility_edges(env, g.vertices, fly_over_holes, model)) {
    if (present.count({std::min(e.u, e.v), std::max(e.u, e.v)})) continue;
    g.deadhead.push_back(std::move(e));
  }
  return g;
}

// ---------------------------------------------------------------------------
// DeadheadPathTable
// ---------------------------------------------------------------------------

DeadheadPathTable DeadheadPathTable::build(const CoverageGraph& g) {
  std::vector<int> sources{g.depot};
  for (const GraphEdge& e : g.required) {
    sources.push_back(e.u);
    sources.push_back(e.v);
  }
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  return build_rows(g, sources);
}

DeadheadPathTable DeadheadPathTable::build_all_sources(const CoverageGraph& g) {
  std::vector<int> sources(g.vertices.size());
  for (std::size_t i = 0; i < sources.size(); ++i) sources[i] = static_cast<int>(i);
  return build_rows(g, sources);
}

DeadheadPathTable DeadheadPathTable::build_rows(const CoverageGraph& g,
                                                const std::vector<int>& sources) {
  const std::size_t n = g.vertices.size();
  struct Arc {
    int to;
    double cost, demand;
  };
  std::vector<std::vector<Arc>> adj(n);
  for (const GraphEdge& e : g.deadhead) {
    adj[static_cast<std::size_t>(e.u)].push_back({e.v, e.values.cost_fwd, e.values.demand_fwd});
    adj[static_cast<std::size_t>(e.v)].push_back({e.u, e.values.cost_rev, e.values.demand_rev});
  }

  const bool dense = g.deadhead.size() * 4 > n * n;
  DeadheadPathTable table;
  for (int src : sources) {
    Row row;
    row.cost.assign(n, std::numeric_limits<double>::infinity());
    row.demand.assign(n, std::numeric_limits<double>::infinity());
    row.parent.assign(n, -1);
    row.cost[static_cast<std::size_t>(src)] = 0;
    row.demand[static_cast<std::size_t>(src)] = 0;

    if (dense) {
      std::vector<bool> done(n, false);
      for (std::size_t it = 0; it < n; ++it) {
        int best = -1;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v) {
          if (!done[v] && row.cost[v] < best_cost) {
            best_cost = row.cost[v];
            best = static_cast<int>(v);
          }
        }
        if (best < 0) break;
        done[static_cast<std::size_t>(best)] = true;
        for (const Arc& a : adj[static_cast<std::size_t>(best)]) {
          const double nc = best_cost + a.cost;
          if (nc < row.cost[static_cast<std::size_t>(a.to)]) {
            row.cost[static_cast<std::size_t>(a.to)] = nc;
            row.demand[static_cast<std::size_t>(a.to)] =
                row.demand[static_cast<std::size_t>(best)] + a.demand;
            row.parent[static_cast<std::size_t>(a.to)] = best;
          }
        }
      }
    } else {
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      pq.push({0.0, src});
      std::vector<bool> done(n, false);
      while (!pq.empty()) {
        const auto [c, v] = pq.top();
        pq.pop();
        if (done[static_cast<std::size_t>(v)]) continue;
        done[static_cast<std::size_t>(v)] = true;
        for (const Arc& a : adj[static_cast<std::size_t>(v)]) {
          const double nc = c + a.cost;
          if (nc < row.cost[static_cast<std::size_t>(a.to)]) {
            row.cost[static_cast<std::size_t>(a.to)] = nc;
            row.demand[static_cast<std::size_t>(a.to)] =
                row.demand[static_cast<std::size_t>(v)] + a.demand;
            row.parent[static_cast<std::size_t>(a.to)] = v;
            pq.push({nc, a.to});
          }
        }
      }
    }
    table.row_index_.resize(n, -1);
    table.row_index_[static_cast<std::size_t>(src)] = static_cast<int>(table.rows_.size());
    table.rows_.push_back(std::move(row));
  }

  // every required endpoint and the depot must be mutually reachable
  for (int src : sources) {
    const Row& row = table.row(src);
    for (int dst : sources) {
      if (!std::isfinite(row.cost[static_cast<std::size_t>(dst)]))
        throw DisconnectedInstance("vertex " + std::to_string(dst) +
                                   " unreachable from vertex " + std::to_string(src));
    }
  }
  return table;
}

const DeadheadPathTable::Row& DeadheadPathTable::row(int from) const {
  if (!has_row(from)) throw IndexError("no shortest-path row for vertex " + std::to_string(from));
  return rows_[static_cast<std::size_t>(row_index_[static_cast<std::size_t>(from)])];
}

std::vector<int> DeadheadPathTable::path(int from, int to) const {
  const Row& r = row(from);
  std::vector<int> rev;
  for (int v = to; v != -1; v = r.parent[static_cast<std::size_t>(v)]) {
    rev.push_back(v);
    if (v == from) break;
  }
  if (rev.back() != from) throw DisconnectedInstance("no path between requested vertices");
  std::reverse(rev.begin(), rev.end());
  return rev;
}

// ---------------------------------------------------------------------------
// JSON instance format
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json edge_to_json(const GraphEdge& e) {
  return json{{"u", e.u},
              {"v", e.v},
              {"cost_fwd", e.values.cost_fwd},
              {"cost_rev", e.values.cost_rev},
              {"demand_fwd", e.values.demand_fwd},
              {"demand_rev", e.values.demand_rev}};
}

GraphEdge edge_from_json(const json& j) {
  GraphEdge e;
  e.u = j.at("u").get<int>();
  e.v = j.at("v").get<int>();
  e.values.cost_fwd = j.at("cost_fwd").get<double>();
  e.values.cost_rev = j.at("cost_rev").get<double>();
  e.values.demand_fwd = j.at("demand_fwd").get<double>();
  e.values.demand_rev = j.at("demand_rev").get<double>();
  return e;
}

}  // namespace

std::string instance_to_json(const CoverageGraph& g) {
  json j;
  j["vertices"] = json::array();
  for (const Point& p : g.vertices) j["vertices"].push_back({p.x, p.y});
  j["depot"] = g.depot;
  if (std::isfinite(g.capacity)) {
    j["capacity"] = g.capacity;
  } else {
    j["capacity"] = "inf";
  }
  j["required_edges"] = json::array();
  for (const GraphEdge& e : g.required) j["required_edges"].push_back(edge_to_json(e));
  j["non_required_edges"] = json::array();
  for (const GraphEdge& e : g.deadhead) j["non_required_edges"].push_back(edge_to_json(e));
  return j.dump(2);
}

CoverageGraph instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("instance parse error: ") + e.what());
  }
  try {
    CoverageGraph g;
    for (const auto& p : j.at("vertices"))
      g.vertices.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    g.depot = j.at("depot").get<int>();
    const auto& cap = j.at("capacity");
    g.capacity = cap.is_string() ? kInfiniteCapacity : cap.get<double>();
    for (const auto& e : j.at("required_edges")) g.required.push_back(edge_from_json(e));
    for (const auto& e : j.at("non_required_edges")) g.deadhead.push_back(edge_from_json(e));
    if (g.depot < 0 || static_cast<std::size_t>(g.depot) >= g.vertices.size())
      throw FormatError("instance depot id out of range");
    for (const GraphEdge& e : g.required) {
      if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= g.vertices.size() ||
          static_cast<std::size_t>(e.v) >= g.vertices.size())
        throw FormatError("instance edge endpoint out of range");
    }
    return g;
  } catch (const json::exception& e) {
    throw FormatError(std::string("instance schema error: ") + e.what());
  }
}

void save_instance(const CoverageGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << instance_to_json(g) << "\n";
}

CoverageGraph load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return instance_from_json(text);
}

}  // namespace covplan
