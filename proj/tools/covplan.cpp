#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "covplan/errors.hpp"
#include "covplan/planner.hpp"

namespace {

using namespace covplan;

Point parse_depot(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("depot must be given as X,Y");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (...) {
    throw ConfigError("depot must be given as X,Y");
  }
}

double parse_capacity(const std::string& s) {
  if (s == "inf" || s == "INF" || s == "infinite") return kInfiniteCapacity;
  try {
    const double q = std::stod(s);
    if (q <= 0) throw ConfigError("capacity must be positive or inf");
    return q;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("capacity must be a number or 'inf'");
  }
}

CostKind parse_cost(const std::string& s) {
  if (s == "length") return CostKind::length;
  if (s == "ramp") return CostKind::ramp_time;
  if (s == "wind") return CostKind::directed_speed_time;
  throw ConfigError("cost must be one of: length, ramp, wind");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content << "\n";
}

int run_plan(const PlanConfig& cfg) {
  const PlanResult result = plan(cfg);
  if (!cfg.out_geojson.empty()) emit_geojson(result.solution, cfg.out_geojson);
  if (!cfg.out_svg.empty())
    emit_svg(result.env, result.cells, result.tracks, result.solution, cfg.out_svg);
  const std::string report = report_to_json(result.report, !cfg.no_timings);
  if (!cfg.out_report.empty()) {
    write_file(cfg.out_report, report);
  } else {
    std::cout << report << "\n";
  }
  return 0;
}

int run_decompose(const std::string& env_path, const std::string& svg_path,
                  const std::string& report_path) {
  const PolygonWithHoles env = load_environment(env_path);
  const DecompositionPipeline pipeline = run_decomposition(env);
  if (!svg_path.empty()) emit_svg(env, pipeline.after_merge, {}, Solution{}, svg_path);
  nlohmann::json j;
  j["initial_cells"] = pipeline.initial.cells.size();
  j["initial_total_msa"] = pipeline.initial.total_msa;
  j["after_split_cells"] = pipeline.after_split.size();
  j["after_split_total_msa"] = total_msa(pipeline.after_split);
  j["final_cells"] = pipeline.after_merge.size();
  j["final_total_msa"] = total_msa(pipeline.after_merge);
  const std::string report = j.dump(2);
  if (!report_path.empty()) {
    write_file(report_path, report);
  } else {
    std::cout << report << "\n";
  }
  return 0;
}

int run_route(const std::string& instance_path, const std::string& capacity_str,
              const std::string& out_path, const std::string& geojson_path) {
  CoverageGraph g = load_instance(instance_path);
  if (!capacity_str.empty()) g.capacity = parse_capacity(capacity_str);
  const Solution sol = mem_solve(g);
  const std::string text = solution_to_json(sol);
  if (!out_path.empty()) {
    write_file(out_path, text);
  } else {
    std::cout << text << "\n";
  }
  if (!geojson_path.empty()) emit_geojson(sol, geojson_path);
  return 0;
}

int run_batch_cmd(const std::string& configs, const std::string& out, unsigned jobs) {
  const auto results = run_batch(configs, out, jobs);
  std::size_t ok = 0;
  for (const auto& r : results) {
    if (r.succeeded) {
      ++ok;
    } else {
      std::cerr << r.name << ": " << r.error << "\n";
    }
  }
  std::cout << ok << "/" << results.size() << " instance(s) planned into " << out << "\n";
  return ok == results.size() ? 0 : 4;
}

int run_convert(const std::string& input, const std::string& kind_str, const std::string& output) {
  DatasetKind kind;
  if (kind_str == "indoor25") {
    kind = DatasetKind::indoor25;
  } else if (kind_str == "outdoor300") {
    kind = DatasetKind::outdoor300;
  } else {
    throw ConfigError("kind must be indoor25 or outdoor300");
  }
  const auto converted = convert_dataset(input, kind, output);
  std::cout << "converted " << converted.size() << " instance(s) into " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covplan: multi-robot coverage route planner"};
  app.require_subcommand(1);

  PlanConfig cfg;
  std::string depot_str = "0,0";
  std::string capacity_str = "inf";
  std::string cost_str = "length";

  CLI::App* plan_cmd = app.add_subcommand("plan", "run the full planning pipeline");
  plan_cmd->add_option("--env", cfg.env_path, "environment file (JSON)")->required();
  plan_cmd->add_option("--depot", depot_str, "depot location X,Y");
  plan_cmd->add_option("--capacity", capacity_str, "route capacity (number or 'inf')");
  plan_cmd->add_option("--fov", cfg.fov, "sensor field-of-view / tool width (m)")->required();
  plan_cmd->add_option("--cost", cost_str, "cost model: length | ramp | wind");
  plan_cmd->add_option("--vmax", cfg.v_max, "ramp model max velocity (m/s)");
  plan_cmd->add_option("--amax", cfg.a_max, "ramp model max acceleration (m/s^2)");
  plan_cmd->add_option("--service-speed", cfg.service_speed, "service speed (m/s, wind model)");
  plan_cmd->add_option("--deadhead-speed", cfg.deadhead_speed, "deadhead speed (m/s, wind model)");
  plan_cmd->add_option("--wind-speed", cfg.wind_speed, "wind speed (m/s)");
  plan_cmd->add_option("--wind-from", cfg.wind_from_deg, "wind origin bearing (deg)");
  plan_cmd->add_flag("--fly-over-holes", cfg.fly_over_holes, "deadheading may cross holes");
  plan_cmd->add_flag("--include-boundary", cfg.include_boundary,
                     "add the free-workspace boundary to the service tracks");
  plan_cmd->add_option("--out", cfg.out_geojson, "routes GeoJSON output path");
  plan_cmd->add_option("--svg", cfg.out_svg, "SVG drawing output path");
  plan_cmd->add_option("--report", cfg.out_report, "report JSON output path (default stdout)");
  plan_cmd->add_flag("--no-timings", cfg.no_timings, "omit stage timings from the report");
  plan_cmd->add_option("--seed", cfg.seed, "RNG seed for sampled checks");

  std::string dec_env, dec_svg, dec_report;
  CLI::App* dec_cmd = app.add_subcommand("decompose", "cell decomposition only");
  dec_cmd->add_option("--env", dec_env, "environment file (JSON)")->required();
  dec_cmd->add_option("--svg", dec_svg, "SVG drawing output path");
  dec_cmd->add_option("--report", dec_report, "report JSON output path (default stdout)");

  std::string route_instance, route_capacity, route_out, route_geojson;
  CLI::App* route_cmd = app.add_subcommand("route", "solve a serialized line-coverage instance");
  route_cmd->add_option("--instance", route_instance, "instance JSON path")->required();
  route_cmd->add_option("--capacity", route_capacity, "override instance capacity");
  route_cmd->add_option("--out", route_out, "solution JSON output path (default stdout)");
  route_cmd->add_option("--geojson", route_geojson, "routes GeoJSON output path");

  std::string batch_configs, batch_out = ".";
  unsigned batch_jobs = std::thread::hardware_concurrency();
  CLI::App* batch_cmd = app.add_subcommand("batch", "plan every *.config.json in a directory");
  batch_cmd->add_option("--configs", batch_configs, "directory of config files")->required();
  batch_cmd->add_option("--out", batch_out, "output directory for reports");
  batch_cmd->add_option("--jobs", batch_jobs, "worker threads");

  std::string conv_in, conv_kind, conv_out = ".";
  CLI::App* conv_cmd = app.add_subcommand("convert-dataset", "convert external dataset files");
  conv_cmd->add_option("--input", conv_in, "dataset file or directory")->required();
  conv_cmd->add_option("--kind", conv_kind, "indoor25 | outdoor300")->required();
  conv_cmd->add_option("--out", conv_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (plan_cmd->parsed()) {
      cfg.depot = parse_depot(depot_str);
      cfg.capacity = parse_capacity(capacity_str);
      cfg.cost_kind = parse_cost(cost_str);
      return run_plan(cfg);
    }
    if (dec_cmd->parsed()) return run_decompose(dec_env, dec_svg, dec_report);
    if (route_cmd->parsed()) return run_route(route_instance, route_capacity, route_out, route_geojson);
    if (batch_cmd->parsed()) return run_batch_cmd(batch_configs, batch_out, batch_jobs);
    if (conv_cmd->parsed()) return run_convert(conv_in, conv_kind, conv_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const WindTooStrong& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidRing& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 3;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 3;
  } catch (const InvalidDepot& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 3;
  } catch (const InfeasibleEdge& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 4;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 4;
  } catch (const DisconnectedInstance& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 4;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 5;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 5;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
