#include "nfbp/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nfbp/error.hpp"

namespace nfbp {

namespace {

#include "bundled_scenarios.inc"  // kBundledScenarios: {name, text} pairs

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& what) {
  const YAML::Mark m = node.Mark();
  throw Error(ErrorCode::ParseError, "line " + std::to_string(m.line + 1) + ", column " +
                                         std::to_string(m.column + 1) + ": " + what);
}

double as_double(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail_at(node, path + ": expected a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail_at(node, path + ": expected a number");
  }
}

std::size_t as_count(const YAML::Node& node, const std::string& path) {
  const double v = as_double(node, path);
  if (v < 0.0 || v != std::floor(v) || v > 1e12)
    fail_at(node, path + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::vector<double> as_vector(const YAML::Node& node, const std::string& path,
                              std::size_t n) {
  if (!node.IsSequence() || node.size() != n)
    fail_at(node, path + ": expected a list of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(as_double(node[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Position3 as_position(const YAML::Node& node, const std::string& path) {
  const auto v = as_vector(node, path, 3);
  return {v[0], v[1], v[2]};
}

std::string as_string(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail_at(node, path + ": expected a string");
  return node.as<std::string>();
}

void parse_scene(const YAML::Node& node, Scene& scene) {
  if (!node.IsMap()) fail_at(node, "scene: expected a mapping");
  if (const auto list = node["scatterers"]) {
    if (!list.IsSequence()) fail_at(list, "scene.scatterers: expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "scene.scatterers[" + std::to_string(i) + "]";
      const auto item = list[i];
      if (!item.IsMap() || !item["position"]) fail_at(item, path + ": needs a position");
      PointScatterer s;
      s.position = as_position(item["position"], path + ".position");
      if (const auto refl = item["reflectivity"]) {
        if (refl.IsSequence()) {
          const auto v = as_vector(refl, path + ".reflectivity", 2);
          s.reflectivity = {v[0], v[1]};
        } else {
          s.reflectivity = {as_double(refl, path + ".reflectivity"), 0.0};
        }
      }
      scene.scatterers.push_back(s);
    }
  }
  if (const auto rings = node["rings"]) {
    if (!rings.IsMap()) fail_at(rings, "scene.rings: expected a mapping");
    const double inner = as_double(rings["inner_radius"], "scene.rings.inner_radius");
    const double outer = as_double(rings["outer_radius"], "scene.rings.outer_radius");
    const double z = rings["z"] ? as_double(rings["z"], "scene.rings.z") : 0.0;
    const std::size_t per_ring =
        rings["per_ring"] ? as_count(rings["per_ring"], "scene.rings.per_ring") : 7;
    if (per_ring == 0) fail_at(rings, "scene.rings.per_ring: must be >= 1");
    const Scene generated = two_ring_scene(inner, outer, z, per_ring);
    scene.scatterers.insert(scene.scatterers.end(), generated.scatterers.begin(),
                            generated.scatterers.end());
  }
  if (const auto lat = node["lattice"]) {
    if (!lat.IsMap()) fail_at(lat, "scene.lattice: expected a mapping");
    const Position3 c = as_position(lat["center"], "scene.lattice.center");
    const auto size = as_vector(lat["size"], "scene.lattice.size", 2);
    const double pitch = as_double(lat["pitch"], "scene.lattice.pitch");
    if (!(pitch > 0.0)) fail_at(lat["pitch"], "scene.lattice.pitch: must be > 0");
    struct Hole {
      double x, y, radius, w, h;
    };
    std::vector<Hole> holes;
    if (const auto hs = lat["holes"]) {
      for (std::size_t i = 0; i < hs.size(); ++i) {
        const std::string path = "scene.lattice.holes[" + std::to_string(i) + "]";
        const auto hc = as_vector(hs[i]["center"], path + ".center", 2);
        Hole h{hc[0], hc[1], 0.0, 0.0, 0.0};
        if (hs[i]["radius"]) {
          h.radius = as_double(hs[i]["radius"], path + ".radius");
        } else {
          const auto wh = as_vector(hs[i]["size"], path + ".size", 2);
          h.w = wh[0];
          h.h = wh[1];
        }
        holes.push_back(h);
      }
    }
    const auto nx = static_cast<std::size_t>(std::floor(size[0] / pitch + 1e-9)) + 1;
    const auto ny = static_cast<std::size_t>(std::floor(size[1] / pitch + 1e-9)) + 1;
    for (std::size_t iy = 0; iy < ny; ++iy) {
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const double x = c.x - 0.5 * static_cast<double>(nx - 1) * pitch + ix * pitch;
        const double y = c.y - 0.5 * static_cast<double>(ny - 1) * pitch + iy * pitch;
        bool cut = false;
        for (const auto& h : holes) {
          if (h.radius > 0.0)
            cut |= std::hypot(x - h.x, y - h.y) < h.radius;
          else
            cut |= std::abs(x - h.x) < 0.5 * h.w && std::abs(y - h.y) < 0.5 * h.h;
        }
        if (!cut) scene.scatterers.push_back({{x, y, c.z}, {1.0, 0.0}});
      }
    }
  }
}

void parse_array(const YAML::Node& node, ArraySpec& a) {
  if (!node.IsMap()) fail_at(node, "array: expected a mapping");
  const std::string kind = node["layout"] ? as_string(node["layout"], "array.layout") : "spiral";
  if (kind == "spiral") {
    a.kind = LayoutKind::Spiral;
    if (node["count"]) a.count = as_count(node["count"], "array.count");
    if (node["r_max"]) a.r_max = as_double(node["r_max"], "array.r_max");
  } else if (kind == "rect") {
    a.kind = LayoutKind::Rect;
    if (node["nx"]) a.nx = as_count(node["nx"], "array.nx");
    if (node["ny"]) a.ny = as_count(node["ny"], "array.ny");
    if (node["lx"]) a.lx = as_double(node["lx"], "array.lx");
    if (node["ly"]) a.ly = as_double(node["ly"], "array.ly");
  } else if (kind == "cluster") {
    a.kind = LayoutKind::Cluster;
    if (node["clusters_x"]) a.clusters_x = as_count(node["clusters_x"], "array.clusters_x");
    if (node["clusters_y"]) a.clusters_y = as_count(node["clusters_y"], "array.clusters_y");
    if (node["per_edge"]) a.per_edge = as_count(node["per_edge"], "array.per_edge");
    if (node["cluster_size"])
      a.cluster_size = as_double(node["cluster_size"], "array.cluster_size");
    a.cluster_pitch = node["cluster_pitch"]
                          ? as_double(node["cluster_pitch"], "array.cluster_pitch")
                          : a.cluster_size;
  } else {
    fail_at(node["layout"], "array.layout: expected spiral, rect or cluster");
  }
  if (node["z"]) a.z = as_double(node["z"], "array.z");
  if (const auto shifts = node["sar_shifts"]) {
    if (!shifts.IsSequence()) fail_at(shifts, "array.sar_shifts: expected a list");
    for (std::size_t i = 0; i < shifts.size(); ++i)
      a.sar_shifts.push_back(
          as_position(shifts[i], "array.sar_shifts[" + std::to_string(i) + "]"));
  }
}

void parse_grid(const YAML::Node& node, ImageGrid& grid) {
  if (!node.IsMap()) fail_at(node, "grid: expected a mapping");
  const auto sp = as_vector(node["spacing"], "grid.spacing", 3);
  const auto dv = as_vector(node["dims"], "grid.dims", 3);
  std::array<std::size_t, 3> dims{};
  for (int i = 0; i < 3; ++i) {
    if (dv[i] < 0.0 || dv[i] != std::floor(dv[i]))
      fail_at(node["dims"], "grid.dims: expected non-negative integers");
    dims[i] = static_cast<std::size_t>(dv[i]);
  }
  const std::array<double, 3> spacing{sp[0], sp[1], sp[2]};
  if (node["center"]) {
    grid = ImageGrid::centered(as_position(node["center"], "grid.center"), spacing, dims);
  } else if (node["origin"]) {
    grid.origin = as_position(node["origin"], "grid.origin");
    grid.spacing = spacing;
    grid.dims = dims;
  } else {
    fail_at(node, "grid: needs center or origin");
  }
}

}  // namespace

std::vector<double> FrequencySpec::values() const {
  std::vector<double> out;
  if (count == 1) {
    out.push_back(start_hz);
    return out;
  }
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(start_hz + (stop_hz - start_hz) * static_cast<double>(i) /
                                 static_cast<double>(count - 1));
  return out;
}

double Scenario::effective_target_radius() const {
  if (target_radius) return *target_radius;
  const double centre = 0.5 * (frequencies.start_hz + frequencies.stop_hz);
  return centre > 0.0 ? kSpeedOfLight / centre : 0.0;
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(e.mark.line + 1) +
                                           ", column " + std::to_string(e.mark.column + 1) +
                                           ": " + e.msg);
  }
  if (!root.IsMap()) throw Error(ErrorCode::ParseError, "scenario must be a YAML mapping");

  Scenario s;
  try {
    if (root["name"]) s.name = as_string(root["name"], "name");
    if (root["seed"]) s.seed = as_count(root["seed"], "seed");
    if (root["scene"]) parse_scene(root["scene"], s.scene);
    if (root["dataset"]) {
      std::filesystem::path p(as_string(root["dataset"], "dataset"));
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      s.dataset = p.string();
    }
    if (root["array"]) parse_array(root["array"], s.array);
    if (const auto f = root["frequencies"]) {
      if (!f.IsMap()) fail_at(f, "frequencies: expected a mapping");
      if (f["start_hz"]) s.frequencies.start_hz = as_double(f["start_hz"], "frequencies.start_hz");
      s.frequencies.stop_hz = f["stop_hz"] ? as_double(f["stop_hz"], "frequencies.stop_hz")
                                           : s.frequencies.start_hz;
      if (f["count"]) s.frequencies.count = as_count(f["count"], "frequencies.count");
    }
    if (root["grid"]) parse_grid(root["grid"], s.grid);
    if (const auto ops = root["operators"]) {
      if (!ops.IsSequence()) fail_at(ops, "operators: expected a list");
      for (std::size_t i = 0; i < ops.size(); ++i) {
        const auto name = as_string(ops[i], "operators[" + std::to_string(i) + "]");
        const auto kind = parse_operator_kind(name);
        if (!kind)
          fail_at(ops[i], "operators[" + std::to_string(i) + "]: unknown operator '" + name +
                              "' (expected PhaseOnly, F0, F1 or F2)");
        s.operators.push_back(*kind);
      }
    }
    if (const auto noise = root["noise"]) {
      if (!noise.IsMap() || !noise["snr_db"]) fail_at(noise, "noise: expected snr_db");
      s.snr_db = as_double(noise["snr_db"], "noise.snr_db");
    }
    if (const auto an = root["analysis"]) {
      if (an["target_radius"])
        s.target_radius = as_double(an["target_radius"], "analysis.target_radius");
    }
    if (root["output"]) s.output = as_string(root["output"], "output");
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(e.mark.line + 1) +
                                           ", column " + std::to_string(e.mark.column + 1) +
                                           ": " + e.msg);
  }
  return s;
}

std::vector<std::string> bundled_scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : kBundledScenarios) names.emplace_back(name);
  return names;
}

std::optional<std::string> bundled_scenario_text(const std::string& name) {
  for (const auto& [n, text] : kBundledScenarios)
    if (name == n) return std::string(text);
  return std::nullopt;
}

Scenario load_scenario(const std::string& path_or_name) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(path_or_name)) {
    std::ifstream in(path_or_name);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path_or_name);
    std::stringstream buf;
    buf << in.rdbuf();
    const fs::path parent = fs::path(path_or_name).parent_path();
    return parse_scenario(buf.str(), parent.empty() ? "." : parent.string());
  }
  if (const auto text = bundled_scenario_text(path_or_name)) return parse_scenario(*text, ".");
  throw Error(ErrorCode::IoError,
              "no scenario file or bundled scenario named '" + path_or_name + "'");
}

std::vector<Diagnostic> validate(const Scenario& s) {
  std::vector<Diagnostic> out;
  auto report = [&out](std::string path, std::string message) {
    out.push_back({std::move(path), std::move(message)});
  };

  if (s.operators.empty())
    report("operators", "must list at least one of PhaseOnly, F0, F1, F2");

  std::optional<double> aperture_z;
  if (s.dataset) {
    try {
      const MeasurementSet ms = read_measurements(*s.dataset);
      if (ms.empty()) report("dataset", "dataset contains no samples");
      else aperture_z = ms.layout.aperture_z();
      if (ms.frequencies.empty()) report("dataset", "dataset has no frequencies");
    } catch (const Error& e) {
      report("dataset", std::string("unreadable dataset: ") + e.what());
    }
  } else {
    const auto& a = s.array;
    switch (a.kind) {
      case LayoutKind::Spiral:
        if (a.count < 1) report("array.count", "must be >= 1");
        if (!(a.r_max > 0.0)) report("array.r_max", "must be > 0");
        break;
      case LayoutKind::Rect:
        if (a.nx < 1) report("array.nx", "must be >= 1");
        if (a.ny < 1) report("array.ny", "must be >= 1");
        if (!(a.lx > 0.0)) report("array.lx", "must be > 0");
        if (!(a.ly > 0.0)) report("array.ly", "must be > 0");
        break;
      case LayoutKind::Cluster:
        if (a.clusters_x < 1) report("array.clusters_x", "must be >= 1");
        if (a.clusters_y < 1) report("array.clusters_y", "must be >= 1");
        if (a.per_edge < 1) report("array.per_edge", "must be >= 1");
        if (!(a.cluster_size > 0.0)) report("array.cluster_size", "must be > 0");
        if (!(a.cluster_pitch >= a.cluster_size))
          report("array.cluster_pitch", "must be >= cluster_size");
        break;
    }
    if (!std::isfinite(a.z)) report("array.z", "must be finite");
    aperture_z = a.z;
    for (std::size_t i = 0; i < a.sar_shifts.size(); ++i)
      if (a.sar_shifts[i].z != 0.0)
        report("array.sar_shifts[" + std::to_string(i) + "]",
               "shift must lie in the aperture plane (z = 0)");

    const auto& f = s.frequencies;
    if (f.count < 1) report("frequencies.count", "must be >= 1");
    if (!(f.start_hz > 0.0)) report("frequencies.start_hz", "must be > 0");
    if (f.count > 1 && !(f.stop_hz > f.start_hz))
      report("frequencies.stop_hz", "must exceed start_hz when count > 1");

    if (s.scene.scatterers.empty())
      report("scene", "needs at least one scatterer (or a dataset)");
    for (std::size_t i = 0; i < s.scene.scatterers.size(); ++i) {
      const auto& sc = s.scene.scatterers[i];
      const std::string path = "scene.scatterers[" + std::to_string(i) + "]";
      if (!std::isfinite(sc.position.x) || !std::isfinite(sc.position.y) ||
          !std::isfinite(sc.position.z))
        report(path + ".position", "must be finite");
      else if (sc.position.z == a.z)
        report(path + ".position", "scatterer on aperture plane");
      else if (sc.position.z > a.z)
        report(path + ".position", "scatterer behind the aperture plane");
      if (!std::isfinite(sc.reflectivity.real()) || !std::isfinite(sc.reflectivity.imag()))
        report(path + ".reflectivity", "must be finite");
    }
  }

  bool grid_ok = true;
  for (int i = 0; i < 3; ++i) {
    if (!(s.grid.spacing[i] > 0.0)) {
      report("grid.spacing", "must be > 0 on every axis");
      grid_ok = false;
      break;
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (s.grid.dims[i] < 1) {
      report("grid.dims", "must be >= 1 on every axis");
      grid_ok = false;
      break;
    }
  }
  if (grid_ok && aperture_z && !(s.grid.max_z() < *aperture_z))
    report("grid", "grid must satisfy R_z < 0");

  if (s.snr_db && !std::isfinite(*s.snr_db)) report("noise.snr_db", "must be finite");
  if (s.target_radius && !(*s.target_radius > 0.0))
    report("analysis.target_radius", "must be > 0");
  return out;
}

void require_valid(const Scenario& s) {
  const auto diagnostics = validate(s);
  if (!diagnostics.empty())
    throw Error(ErrorCode::ValidationError, "validation error: " + diagnostics.front().message +
                                                " (at " + diagnostics.front().path + ")");
}

ArrayLayout build_layout(const Scenario& s) {
  const auto& a = s.array;
  ArrayLayout base;
  switch (a.kind) {
    case LayoutKind::Spiral: base = spiral_layout(a.count, a.r_max, a.z); break;
    case LayoutKind::Rect: base = rect_layout(a.nx, a.ny, a.lx, a.ly, a.z); break;
    case LayoutKind::Cluster:
      base = cluster_layout(a.clusters_x, a.clusters_y, a.cluster_size, a.cluster_pitch,
                            a.per_edge, a.z);
      break;
  }
  if (a.sar_shifts.empty()) return base;
  ArrayLayout all;
  for (const auto& shift : a.sar_shifts) all = concat_layouts(all, shift_layout(base, shift));
  return all;
}

MeasurementSet build_measurements(const Scenario& s, unsigned workers) {
  require_valid(s);
  MeasurementSet ms;
  if (s.dataset) {
    ms = read_measurements(*s.dataset);
  } else {
    Scenario single = s;
    single.array.sar_shifts.clear();
    const ArrayLayout base = build_layout(single);
    const auto freqs = s.frequencies.values();
    if (s.array.sar_shifts.empty()) {
      ms = synthesize(s.scene, base, freqs, Pairing::FullMatrix, workers);
    } else {
      for (const auto& shift : s.array.sar_shifts)
        ms = merge(ms, synthesize(s.scene, shift_layout(base, shift), freqs,
                                  Pairing::FullMatrix, workers));
    }
  }
  if (s.snr_db) ms = add_noise(ms, *s.snr_db, s.seed);
  return ms;
}

}  // namespace nfbp
