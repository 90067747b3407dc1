#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "covplan/errors.hpp"
#include "covplan/planner.hpp"

namespace covplan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TextLine {
  std::string text;
  std::size_t number;
};

std::vector<TextLine> meaningful_lines(const std::string& content) {
  std::vector<TextLine> lines;
  std::istringstream in(content);
  std::string line;
  std::size_t num = 0;
  while (std::getline(in, line)) {
    ++num;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      lines.push_back({"", num});  // keep blanks: they separate rings in format B
      continue;
    }
    if (line[first] == '#') continue;
    lines.push_back({line.substr(first), num});
  }
  return lines;
}

std::vector<double> numbers_on_line(const TextLine& l) {
  std::vector<double> out;
  std::istringstream in(l.text);
  std::string tok;
  while (in >> tok) {
    // tolerate comma separators
    std::erase(tok, ',');
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw FormatError("");
      out.push_back(v);
    } catch (...) {
      throw FormatError("line " + std::to_string(l.number) + ": expected a number, got '" + tok +
                        "'");
    }
  }
  return out;
}

// Format A: polygon count, then per polygon a vertex count followed by that many x y pairs.
PolygonWithHoles parse_counted(const std::vector<TextLine>& lines) {
  std::vector<double> flat;
  std::vector<std::size_t> line_of;
  for (const TextLine& l : lines) {
    if (l.text.empty()) continue;
    for (double v : numbers_on_line(l)) {
      flat.push_back(v);
      line_of.push_back(l.number);
    }
  }
  std::size_t pos = 0;
  auto take = [&](const char* what) {
    if (pos >= flat.size())
      throw FormatError("line " + std::to_string(lines.back().number) + ": unexpected end of file while reading " +
                        what);
    return flat[pos++];
  };
  const auto npoly = static_cast<std::size_t>(take("polygon count"));
  if (npoly == 0 || npoly > 10000)
    throw FormatError("line " + std::to_string(line_of.front()) + ": implausible polygon count");
  PolygonWithHoles env;
  for (std::size_t p = 0; p < npoly; ++p) {
    const auto nv = static_cast<std::size_t>(take("vertex count"));
    if (nv < 3 || nv > 1000000)
      throw FormatError("line " + std::to_string(line_of[std::min(pos - 1, line_of.size() - 1)]) +
                        ": implausible vertex count");
    Ring ring;
    for (std::size_t i = 0; i < nv; ++i) {
      const double x = take("x coordinate");
      const double y = take("y coordinate");
      ring.vertices.push_back({x, y});
    }
    if (p == 0) {
      env.outer = std::move(ring);
    } else {
      env.holes.push_back(std::move(ring));
    }
  }
  return env;
}

// Format B: one "x y" pair per line; blank lines separate rings; first ring is the outer.
PolygonWithHoles parse_pairs(const std::vector<TextLine>& lines) {
  PolygonWithHoles env;
  Ring ring;
  bool have_outer = false;
  auto flush = [&]() {
    if (ring.vertices.empty()) return;
    if (ring.vertices.size() < 3)
      throw FormatError("ring with fewer than 3 vertices before line " +
                        std::to_string(lines.back().number));
    if (!have_outer) {
      env.outer = std::move(ring);
      have_outer = true;
    } else {
      env.holes.push_back(std::move(ring));
    }
    ring = Ring{};
  };
  for (const TextLine& l : lines) {
    if (l.text.empty()) {
      flush();
      continue;
    }
    const auto nums = numbers_on_line(l);
    if (nums.size() != 2)
      throw FormatError("line " + std::to_string(l.number) + ": expected 'x y'");
    ring.vertices.push_back({nums[0], nums[1]});
  }
  flush();
  if (!have_outer) throw FormatError("file contains no ring");
  return env;
}

PolygonWithHoles parse_instance_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("missing or unreadable file: " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  // JSON first (native schema or GeoJSON)
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (content[first] == '{' || content[first] == '[')) {
    return environment_from_json(content);
  }

  const auto lines = meaningful_lines(content);
  std::size_t first_nonblank = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!lines[i].text.empty()) {
      first_nonblank = i;
      break;
    }
  }
  if (first_nonblank == lines.size()) throw FormatError("file is empty: " + path.string());

  PolygonWithHoles env = numbers_on_line(lines[first_nonblank]).size() == 1
                             ? parse_counted(lines)
                             : parse_pairs(lines);
  if (repair_and_validate(env)) {
    // orientation repairs are routine for converted data; no warning spam
  }
  return env;
}

json config_json(DatasetKind kind, bool capacitated) {
  json cfg;
  if (kind == DatasetKind::indoor25) {
    cfg["fov"] = 0.1;
    cfg["cost"] = "length";
    cfg["include_boundary"] = true;
    cfg["capacity"] = "inf";
  } else {
    cfg["fov"] = 3.0;
    cfg["cost"] = "ramp";
    cfg["vmax"] = 3.0;
    cfg["amax"] = 1.0;
    cfg["capacity"] = capacitated ? json(1200.0) : json("inf");
  }
  return cfg;
}

}  // namespace

std::vector<ConvertedInstance> convert_dataset(const std::string& input_dir, DatasetKind kind,
                                               const std::string& output_dir) {
  const fs::path in_dir(input_dir);
  if (!fs::exists(in_dir)) throw FormatError("missing dataset path: " + input_dir);
  fs::create_directories(output_dir);

  std::vector<fs::path> files;
  if (fs::is_regular_file(in_dir)) {
    files.push_back(in_dir);
  } else {
    for (const auto& entry : fs::recursive_directory_iterator(in_dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (name.starts_with(".")) continue;
      files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  }

  std::vector<ConvertedInstance> out;
  for (const fs::path& f : files) {
    PolygonWithHoles env;
    try {
      env = parse_instance_file(f);
    } catch (const GeometryError& e) {
      throw FormatError(f.string() + ": " + e.what());
    }
    ConvertedInstance inst;
    inst.name = f.stem().string();
    const fs::path env_path = fs::path(output_dir) / (inst.name + ".env.json");
    {
      std::ofstream env_out(env_path);
      if (!env_out) throw IoError("cannot open for writing: " + env_path.string());
      env_out << environment_to_json(env) << "\n";
    }
    inst.env_file = env_path.string();

    std::vector<std::pair<std::string, json>> configs;
    if (kind == DatasetKind::indoor25) {
      configs.push_back({inst.name + ".config.json", config_json(kind, false)});
    } else {
      configs.push_back({inst.name + ".single.config.json", config_json(kind, false)});
      configs.push_back({inst.name + ".cap1200.config.json", config_json(kind, true)});
    }
    for (auto& [fname, cfg] : configs) {
      cfg["env"] = env_path.string();
      const fs::path cfg_path = fs::path(output_dir) / fname;
      std::ofstream cfg_out(cfg_path);
      if (!cfg_out) throw IoError("cannot open for writing: " + cfg_path.string());
      cfg_out << cfg.dump(2) << "\n";
      inst.config_files.push_back(cfg_path.string());
    }
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace covplan
