#include "covplan/planner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "covplan/errors.hpp"

namespace covplan {

using nlohmann::json;

CostModel PlanConfig::cost_model() const {
  switch (cost_kind) {
    case CostKind::length:
      return CostModel::length();
    case CostKind::ramp_time:
      return CostModel::ramp({v_max, a_max}, {v_max, a_max});
    case CostKind::directed_speed_time:
      return CostModel::wind_model(service_speed, deadhead_speed, {wind_speed, wind_from_deg});
  }
  return CostModel::length();
}

void PlanConfig::validate() const {
  if (fov <= 0) throw ConfigError("fov must be positive");
  if (capacity <= 0) throw ConfigError("capacity must be positive or inf");
  if (cost_kind == CostKind::ramp_time && (v_max <= 0 || a_max <= 0))
    throw ConfigError("ramp model needs positive vmax and amax");
  if (cost_kind == CostKind::directed_speed_time) {
    if (service_speed <= wind_speed || deadhead_speed <= wind_speed)
      throw ConfigError("speeds must exceed the wind speed");
  }
}

// ---------------------------------------------------------------------------
// Environment I/O
// ---------------------------------------------------------------------------

namespace {

Ring ring_from_coords(const json& arr) {
  Ring r;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() < 2) throw FormatError("ring vertex must be [x, y]");
    r.vertices.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  // GeoJSON closes rings explicitly
  if (r.vertices.size() >= 2 && nearly_equal(r.vertices.front(), r.vertices.back()))
    r.vertices.pop_back();
  return r;
}

PolygonWithHoles from_geojson_polygon(const json& coords) {
  if (!coords.is_array() || coords.empty()) throw FormatError("GeoJSON polygon has no rings");
  PolygonWithHoles env;
  env.outer = ring_from_coords(coords.at(0));
  for (std::size_t i = 1; i < coords.size(); ++i) env.holes.push_back(ring_from_coords(coords.at(i)));
  return env;
}

}  // namespace

PolygonWithHoles environment_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("environment parse error: ") + e.what());
  }

  PolygonWithHoles env;
  try {
    if (j.contains("outer")) {
      env.outer = ring_from_coords(j.at("outer"));
      if (j.contains("holes"))
        for (const auto& h : j.at("holes")) env.holes.push_back(ring_from_coords(h));
    } else if (j.value("type", "") == "Polygon") {
      env = from_geojson_polygon(j.at("coordinates"));
    } else if (j.value("type", "") == "Feature") {
      env = from_geojson_polygon(j.at("geometry").at("coordinates"));
    } else if (j.value("type", "") == "FeatureCollection") {
      const auto& features = j.at("features");
      if (features.empty()) throw FormatError("FeatureCollection has no features");
      env = from_geojson_polygon(features.at(0).at("geometry").at("coordinates"));
    } else {
      throw FormatError("unrecognized environment schema");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("environment schema error: ") + e.what());
  }

  if (repair_and_validate(env))
    std::cerr << "warning: ring orientation repaired while loading environment\n";
  return env;
}

PolygonWithHoles load_environment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return environment_from_json(text);
}

std::string environment_to_json(const PolygonWithHoles& env) {
  json j;
  j["outer"] = json::array();
  for (const Point& p : env.outer.vertices) j["outer"].push_back({p.x, p.y});
  j["holes"] = json::array();
  for (const Ring& h : env.holes) {
    json ring = json::array();
    for (const Point& p : h.vertices) ring.push_back({p.x, p.y});
    j["holes"].push_back(ring);
  }
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PlanResult plan_environment(const PolygonWithHoles& env, const PlanConfig& config) {
  config.validate();
  const CostModel model = config.cost_model();
  PlanResult result;
  result.env = env;

  const auto t_start = std::chrono::steady_clock::now();
  auto t0 = t_start;
  DecompositionPipeline pipeline = run_decomposition(env);
  result.cells = std::move(pipeline.after_merge);
  result.report.timings.decomposition_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::vector<ServiceTrack> tracks;
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    auto cell_tracks = generate_tracks(result.cells[c], config.fov, static_cast<int>(c));
    tracks.insert(tracks.end(), cell_tracks.begin(), cell_tracks.end());
  }
  if (config.include_boundary) {
    auto btr = boundary_tracks(env);
    tracks.insert(tracks.end(), btr.begin(), btr.end());
  }
  result.tracks = remove_overlaps(tracks);
  result.report.timings.tracks_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  CoverageGraph graph = build_coverage_graph(env, result.tracks, config.depot, model,
                                             config.capacity, config.fly_over_holes);
  DeadheadPathTable table = DeadheadPathTable::build(graph);
  result.report.timings.graph_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  result.solution = mem_solve(graph, table);
  result.report.timings.routing_s = seconds_since(t0);
  result.report.timings.total_s = seconds_since(t_start);

  PlanReport& rep = result.report;
  rep.cell_count = result.cells.size();
  rep.track_count = result.tracks.size();
  rep.vertex_count = graph.vertices.size();
  rep.routes = result.solution.routes;
  rep.total_cost = result.solution.total_cost;
  rep.total_demand = result.solution.total_demand;
  rep.total_turns = result.solution.total_turns;
  for (const Route& r : result.solution.routes) {
    for (const RouteStep& s : r.steps) {
      const double len = dist(s.from_pt, s.to_pt);
      rep.total_length_m += len;
      if (s.mode == StepMode::service) rep.service_length_m += len;
    }
  }
  return result;
}

PlanResult plan(const PlanConfig& config) {
  PolygonWithHoles env = load_environment(config.env_path);
  return plan_environment(env, config);
}

// ---------------------------------------------------------------------------
// Reports and solution output
// ---------------------------------------------------------------------------

std::string report_to_json(const PlanReport& report, bool include_timings) {
  json j;
  j["cells"] = report.cell_count;
  j["tracks"] = report.track_count;
  j["vertices"] = report.vertex_count;
  j["routes"] = json::array();
  for (const Route& r : report.routes) {
    j["routes"].push_back({{"cost", r.total_cost},
                           {"demand", r.total_demand},
                           {"turns", r.turns},
                           {"steps", r.steps.size()}});
  }
  j["totals"] = {{"cost", report.total_cost},
                 {"demand", report.total_demand},
                 {"turns", report.total_turns},
                 {"length_m", report.total_length_m},
                 {"service_length_m", report.service_length_m},
                 {"route_count", report.routes.size()}};
  if (include_timings) {
    j["timings_s"] = {{"decomposition", report.timings.decomposition_s},
                      {"tracks", report.timings.tracks_s},
                      {"graph", report.timings.graph_s},
                      {"routing", report.timings.routing_s},
                      {"total", report.timings.total_s}};
  }
  return j.dump(2);
}

std::string solution_to_geojson(const Solution& sol) {
  json features = json::array();
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    const Route& route = sol.routes[r];
    std::size_t i = 0;
    while (i < route.steps.size()) {
      const StepMode mode = route.steps[i].mode;
      json coords = json::array();
      coords.push_back({route.steps[i].from_pt.x, route.steps[i].from_pt.y});
      double cost = 0, demand = 0;
      std::size_t j = i;
      while (j < route.steps.size() && route.steps[j].mode == mode) {
        coords.push_back({route.steps[j].to_pt.x, route.steps[j].to_pt.y});
        cost += route.steps[j].cost;
        demand += route.steps[j].demand;
        ++j;
      }
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                          {"properties",
                           {{"route_id", r},
                            {"mode", mode == StepMode::service ? "service" : "deadhead"},
                            {"cost", cost},
                            {"demand", demand}}}});
      i = j;
    }
  }
  json j{{"type", "FeatureCollection"}, {"features", features}};
  return j.dump(2);
}

void emit_geojson(const Solution& sol, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << solution_to_geojson(sol) << "\n";
}

std::string solution_to_json(const Solution& sol) {
  json j;
  j["routes"] = json::array();
  for (const Route& r : sol.routes) {
    json steps = json::array();
    for (const RouteStep& s : r.steps) {
      steps.push_back({{"mode", s.mode == StepMode::service ? "service" : "deadhead"},
                       {"from", s.from},
                       {"to", s.to},
                       {"from_xy", {s.from_pt.x, s.from_pt.y}},
                       {"to_xy", {s.to_pt.x, s.to_pt.y}},
                       {"required_edge", s.required_edge},
                       {"cost", s.cost},
                       {"demand", s.demand}});
    }
    j["routes"].push_back({{"cost", r.total_cost},
                           {"demand", r.total_demand},
                           {"turns", r.turns},
                           {"steps", steps}});
  }
  j["total_cost"] = sol.total_cost;
  j["total_demand"] = sol.total_demand;
  j["total_turns"] = sol.total_turns;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// SVG rendering
// ---------------------------------------------------------------------------

namespace {

const char* kRouteColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                              "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

struct SvgMapper {
  double scale, ox, oy, height;
  double x(double wx) const { return (wx - ox) * scale + 20.0; }
  double y(double wy) const { return height - ((wy - oy) * scale + 20.0); }
};

void svg_ring(std::ostringstream& out, const Ring& r, const SvgMapper& m, const char* style) {
  out << "<path d=\"";
  for (std::size_t i = 0; i < r.vertices.size(); ++i) {
    out << (i == 0 ? "M" : "L") << m.x(r.vertices[i].x) << " " << m.y(r.vertices[i].y) << " ";
  }
  out << "Z\" " << style << "/>\n";
}

}  // namespace

std::string render_svg(const PolygonWithHoles& env, const std::vector<Cell>& cells,
                       const std::vector<ServiceTrack>& tracks, const Solution& sol) {
  const BoundingBox bb = bounding_box(env);
  const double w = std::max(bb.max_x - bb.min_x, 1e-9);
  const double h = std::max(bb.max_y - bb.min_y, 1e-9);
  const double scale = 960.0 / std::max(w, h);
  SvgMapper m{scale, bb.min_x, bb.min_y, h * scale + 40.0};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (w * scale + 40.0)
      << "\" height=\"" << (h * scale + 40.0) << "\">\n";
  svg_ring(out, env.outer, m, "fill=\"#f7f7f7\" stroke=\"black\" stroke-width=\"2\"");
  for (const Ring& hole : env.holes)
    svg_ring(out, hole, m, "fill=\"#c9c9c9\" stroke=\"black\" stroke-width=\"1.5\"");

  for (const Cell& c : cells) {
    svg_ring(out, c.shape.outer, m,
             "fill=\"none\" stroke=\"#888888\" stroke-width=\"0.8\" stroke-dasharray=\"6 4\"");
    for (const Ring& hole : c.shape.holes)
      svg_ring(out, hole, m,
               "fill=\"none\" stroke=\"#888888\" stroke-width=\"0.8\" stroke-dasharray=\"6 4\"");
    // double-headed service-direction arrow at the cell centroid
    Point centroid{0, 0};
    for (const Point& p : c.shape.outer.vertices) centroid = centroid + p;
    centroid = (1.0 / static_cast<double>(c.shape.outer.vertices.size())) * centroid;
    const Point u = c.service_direction.unit();
    const double alen = 0.12 * std::min(w, h);
    const Point a = centroid - (alen * u);
    const Point b = centroid + (alen * u);
    out << "<line x1=\"" << m.x(a.x) << "\" y1=\"" << m.y(a.y) << "\" x2=\"" << m.x(b.x)
        << "\" y2=\"" << m.y(b.y)
        << "\" stroke=\"#444444\" stroke-width=\"1.6\" marker-start=\"url(#arrow)\" "
           "marker-end=\"url(#arrow)\"/>\n";
  }
  out << "<defs><marker id=\"arrow\" viewBox=\"0 0 8 8\" refX=\"4\" refY=\"4\" markerWidth=\"5\" "
         "markerHeight=\"5\" orient=\"auto-start-reverse\"><path d=\"M0 0 L8 4 L0 8 z\" "
         "fill=\"#444444\"/></marker></defs>\n";

  if (sol.routes.empty()) {
    for (const ServiceTrack& t : tracks) {
      out << "<line x1=\"" << m.x(t.segment.a.x) << "\" y1=\"" << m.y(t.segment.a.y) << "\" x2=\""
          << m.x(t.segment.b.x) << "\" y2=\"" << m.y(t.segment.b.y)
          << "\" stroke=\"#1f77b4\" stroke-width=\"1.2\"/>\n";
    }
  } else {
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
      const char* color = kRouteColors[r % (sizeof(kRouteColors) / sizeof(kRouteColors[0]))];
      for (const RouteStep& s : sol.routes[r].steps) {
        out << "<line x1=\"" << m.x(s.from_pt.x) << "\" y1=\"" << m.y(s.from_pt.y) << "\" x2=\""
            << m.x(s.to_pt.x) << "\" y2=\"" << m.y(s.to_pt.y) << "\" stroke=\"" << color
            << "\" stroke-width=\"" << (s.mode == StepMode::service ? 2.0 : 1.0) << "\""
            << (s.mode == StepMode::deadhead ? " stroke-dasharray=\"5 5\"" : "") << "/>\n";
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

void emit_svg(const PolygonWithHoles& env, const std::vector<Cell>& cells,
              const std::vector<ServiceTrack>& tracks, const Solution& sol,
              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << render_svg(env, cells, tracks, sol);
}



// ---------------------------------------------------------------------------
// Batch execution
// ---------------------------------------------------------------------------

namespace {

CostKind cost_kind_from_name(const std::string& name) {
  if (name == "length") return CostKind::length;
  if (name == "ramp") return CostKind::ramp_time;
  if (name == "wind") return CostKind::directed_speed_time;
  throw ConfigError("unknown cost model '" + name + "'");
}

}  // namespace

PlanConfig config_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  PlanConfig cfg;
  try {
    cfg.env_path = j.at("env").get<std::string>();
    cfg.fov = j.at("fov").get<double>();
    if (j.contains("cost")) cfg.cost_kind = cost_kind_from_name(j.at("cost").get<std::string>());
    if (j.contains("capacity")) {
      const auto& cap = j.at("capacity");
      cfg.capacity = cap.is_string() ? kInfiniteCapacity : cap.get<double>();
    }
    if (j.contains("depot")) cfg.depot = {j.at("depot").at(0).get<double>(), j.at("depot").at(1).get<double>()};
    cfg.v_max = j.value("vmax", cfg.v_max);
    cfg.a_max = j.value("amax", cfg.a_max);
    cfg.service_speed = j.value("service_speed", cfg.service_speed);
    cfg.deadhead_speed = j.value("deadhead_speed", cfg.deadhead_speed);
    cfg.wind_speed = j.value("wind_speed", cfg.wind_speed);
    cfg.wind_from_deg = j.value("wind_from", cfg.wind_from_deg);
    cfg.fly_over_holes = j.value("fly_over_holes", false);
    cfg.include_boundary = j.value("include_boundary", false);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.no_timings = j.value("no_timings", false);
    if (!j.contains("depot")) {
      const PolygonWithHoles env = load_environment(cfg.env_path);
      cfg.depot = env.outer.vertices.at(0);
    }
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return cfg;
}

std::vector<BatchResult> run_batch(const std::string& config_dir, const std::string& out_dir,
                                   unsigned jobs) {
  namespace fs = std::filesystem;
  std::vector<fs::path> configs;
  if (!fs::exists(config_dir)) throw IoError("missing config directory: " + config_dir);
  for (const auto& entry : fs::directory_iterator(config_dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().string().ends_with(".config.json")) configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());
  fs::create_directories(out_dir);

  std::vector<BatchResult> results(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) break;
      BatchResult& r = results[i];
      r.name = configs[i].stem().stem().string();
      try {
        const PlanConfig cfg = config_from_json(configs[i].string());
        const PlanResult res = plan(cfg);
        r.report = res.report;
        r.succeeded = true;
        std::ofstream out(fs::path(out_dir) / (configs[i].stem().string() + ".report.json"));
        out << report_to_json(res.report, !cfg.no_timings) << "\n";
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, jobs);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return results;
}
}  // namespace covplan
