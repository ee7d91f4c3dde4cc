#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nfbp/error.hpp"
#include "nfbp/scenario.hpp"

using namespace nfbp;

namespace {

const char* kBase = R"(
name: unit
seed: 3
scene:
  scatterers:
    - position: [0.0, 0.0, 0.0]
      reflectivity: [1.0, 0.5]
    - position: [0.01, 0.0, -0.01]
      reflectivity: 2.0
array:
  layout: spiral
  count: 12
  r_max: 0.05
  z: 0.1
frequencies:
  start_hz: 70.0e9
  stop_hz: 80.0e9
  count: 3
grid:
  center: [0.0, 0.0, 0.0]
  spacing: [0.002, 0.002, 0.002]
  dims: [5, 5, 1]
operators: [PhaseOnly, f2]
)";

std::vector<std::string> paths(const std::vector<Diagnostic>& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(d.path);
  return out;
}

bool has(const std::vector<Diagnostic>& ds, const std::string& path, const std::string& text) {
  for (const auto& d : ds)
    if (d.path == path && d.message.find(text) != std::string::npos) return true;
  return false;
}

std::string parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("parses every field") {
  const auto s = parse_scenario(kBase);
  CHECK(s.name == "unit");
  CHECK(s.seed == 3);
  REQUIRE(s.scene.scatterers.size() == 2);
  CHECK(s.scene.scatterers[0].reflectivity == cplx(1.0, 0.5));
  CHECK(s.scene.scatterers[1].reflectivity == cplx(2.0, 0.0));
  CHECK(s.scene.scatterers[1].position == Position3{0.01, 0.0, -0.01});
  CHECK(s.array.kind == LayoutKind::Spiral);
  CHECK(s.array.count == 12);
  CHECK(s.frequencies.values() == std::vector<double>{70e9, 75e9, 80e9});
  CHECK(s.grid.dims == std::array<std::size_t, 3>{5, 5, 1});
  CHECK(s.grid.voxel(2, 2, 0) == Position3{0.0, 0.0, 0.0});
  CHECK(s.operators ==
        std::vector<FocusingOperatorKind>{FocusingOperatorKind::PhaseOnly, FocusingOperatorKind::F2});
  CHECK(s.effective_target_radius() == doctest::Approx(kSpeedOfLight / 75e9));
  CHECK(validate(s).empty());
}

TEST_CASE("bundled scenarios are well formed") {
  const auto names = bundled_scenario_names();
  for (const char* n : {"smoke", "fig1_point_scatterers", "rect_dense", "sar_plate_like"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  for (const auto& n : names) {
    INFO(n);
    const auto s = load_scenario(n);
    CHECK(s.name == n);
    CHECK(validate(s).empty());
  }
  CHECK_FALSE(bundled_scenario_text("nope").has_value());
  CHECK_THROWS_AS(load_scenario("nope"), Error);
}

TEST_CASE("bundled scenario contents") {
  const auto fig1 = load_scenario("fig1_point_scatterers");
  CHECK(fig1.scene.scatterers.size() == 14);
  const auto layout = build_layout(fig1);
  CHECK(layout.tx_count() == 400);
  CHECK(layout.rx_count() == 400);
  CHECK(layout.aperture_z() == 0.1);
  CHECK(fig1.frequencies.values() == std::vector<double>{40e9});
  CHECK(fig1.grid.spacing[0] == 0.001);

  const auto rect = load_scenario("rect_dense");
  CHECK(build_layout(rect).tx_count() == 1600);
  CHECK(rect.scene.scatterers.size() == 19);

  const auto sar = load_scenario("sar_plate_like");
  const auto f = sar.frequencies.values();
  REQUIRE(f.size() == 128);
  CHECK(f.front() == 71e9);
  CHECK(f.back() == 81e9);
  const auto sl = build_layout(sar);
  CHECK(sl.tx_count() == 2 * 48);
  CHECK(sar.array.sar_shifts.size() == 2);
  CHECK(sar.scene.scatterers.size() > 100);

  const auto smoke = load_scenario("smoke");
  CHECK(smoke.scene.scatterers.size() == 1);
  CHECK(build_layout(smoke).tx_count() == 16);
}

TEST_CASE("scene generators") {
  auto s = parse_scenario(replace(kBase, "scene:\n  scatterers:",
                                  "scene:\n  rings: {inner_radius: 0.01, outer_radius: 0.02, "
                                  "per_ring: 5, z: -0.01}\n  scatterers:"));
  CHECK(s.scene.scatterers.size() == 12);

  s = parse_scenario(replace(kBase, "scene:\n  scatterers:",
                             "scene:\n  lattice:\n    center: [0, 0, 0]\n    size: [0.04, 0.02]\n"
                             "    pitch: 0.01\n    holes:\n      - {center: [0, 0], radius: 0.005}\n"
                             "  scatterers:"));
  // 5 x 3 lattice minus the centre point, plus the two listed scatterers.
  CHECK(s.scene.scatterers.size() == 16);
}

TEST_CASE("frequency count zero names the field") {
  const auto s = parse_scenario(replace(kBase, "count: 3", "count: 0"));
  const auto d = validate(s);
  CHECK(has(d, "frequencies.count", "must be >= 1"));
}

TEST_CASE("scatterer on the aperture plane") {
  const auto s = parse_scenario(replace(kBase, "[0.01, 0.0, -0.01]", "[0.01, 0.0, 0.1]"));
  CHECK(has(validate(s), "scene.scatterers[1].position", "scatterer on aperture plane"));
}

TEST_CASE("grid behind the aperture") {
  const auto s = parse_scenario(replace(kBase, "center: [0.0, 0.0, 0.0]", "center: [0.0, 0.0, 0.2]"));
  CHECK(has(validate(s), "grid", "grid must satisfy R_z < 0"));
  try {
    require_valid(s);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()) == "validation error: grid must satisfy R_z < 0 (at grid)");
  }
  CHECK_THROWS_AS(build_measurements(s), Error);
}

TEST_CASE("every violation is reported") {
  auto text = replace(kBase, "count: 3", "count: 0");
  text = replace(text, "operators: [PhaseOnly, f2]", "operators: []");
  text = replace(text, "spacing: [0.002, 0.002, 0.002]", "spacing: [0.002, 0.0, 0.002]");
  text = replace(text, "r_max: 0.05", "r_max: -1");
  const auto d = validate(parse_scenario(text));
  const auto p = paths(d);
  for (const char* want : {"frequencies.count", "operators", "grid.spacing", "array.r_max"})
    CHECK(std::find(p.begin(), p.end(), want) != p.end());
}

TEST_CASE("parse errors carry line and column") {
  CHECK(parse_error("name: x\nscene: [unclosed\n").find("line ") == 0);
  const auto bad_type = parse_error(replace(kBase, "count: 12", "count: twelve"));
  CHECK(bad_type.find("line 12, column 10") != std::string::npos);
  CHECK(bad_type.find("array.count") != std::string::npos);
  const auto bad_op = parse_error(replace(kBase, "[PhaseOnly, f2]", "[PhaseOnly, F7]"));
  CHECK(bad_op.find("unknown operator 'F7'") != std::string::npos);
  const auto bad_vec = parse_error(replace(kBase, "dims: [5, 5, 1]", "dims: [5, 5]"));
  CHECK(bad_vec.find("grid.dims") != std::string::npos);
  CHECK(parse_error("- just\n- a list\n").find("mapping") != std::string::npos);
  CHECK(parse_error(replace(kBase, "layout: spiral", "layout: hexagon")).find("array.layout") !=
        std::string::npos);
}

TEST_CASE("sar captures are merged without cross pairs") {
  auto s = parse_scenario(
      replace(kBase, "  z: 0.1\n", "  z: 0.1\n  sar_shifts:\n    - [-0.01, 0, 0]\n    - [0.01, 0, 0]\n"));
  CHECK(build_layout(s).tx_count() == 24);
  const auto ms = build_measurements(s, 1);
  CHECK(ms.pairing == Pairing::PairedList);
  CHECK(ms.pair_count() == 2 * 12 * 12);
  CHECK(ms.distinct_tx_count() == 24);
  CHECK(ms.frequency_count() == 3);

  s.array.sar_shifts[0].z = 0.01;
  CHECK(has(validate(s), "array.sar_shifts[0]", "aperture plane"));
}

TEST_CASE("noise is seeded") {
  const auto text = replace(kBase, "operators:", "noise: {snr_db: 10}\noperators:");
  const auto a = build_measurements(parse_scenario(text), 1);
  const auto b = build_measurements(parse_scenario(text), 2);
  const auto clean = build_measurements(parse_scenario(kBase), 1);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != clean.samples);
}

TEST_CASE("dataset scenarios") {
  const auto dir = std::filesystem::temp_directory_path() / "nfbp_unit" / "dataset";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto ms = build_measurements(parse_scenario(kBase), 1);
  write_measurements_bin((dir / "data.nfbp").string(), ms);

  const std::string text =
      "name: from_file\ndataset: data.nfbp\ngrid:\n  center: [0, 0, 0]\n"
      "  spacing: [0.002, 0.002, 0.002]\n  dims: [5, 5, 1]\noperators: [F1]\n";
  std::ofstream(dir / "s.yaml") << text;
  const auto s = load_scenario((dir / "s.yaml").string());
  REQUIRE(s.dataset.has_value());
  CHECK(std::filesystem::path(*s.dataset) == dir / "data.nfbp");
  CHECK_FALSE(s.has_truth());
  CHECK(validate(s).empty());
  CHECK(build_measurements(s, 1).samples == ms.samples);

  std::ofstream(dir / "missing.yaml") << replace(text, "data.nfbp", "nothing.nfbp");
  CHECK(has(validate(load_scenario((dir / "missing.yaml").string())), "dataset", "unreadable"));

  std::ofstream(dir / "behind.yaml") << replace(text, "center: [0, 0, 0]", "center: [0, 0, 0.1]");
  CHECK(has(validate(load_scenario((dir / "behind.yaml").string())), "grid",
            "grid must satisfy R_z < 0"));
}
