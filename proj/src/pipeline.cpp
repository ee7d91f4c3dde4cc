#include "nfbp/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

#include "nfbp/error.hpp"

namespace nfbp {

namespace {

std::string op_name(FocusingOperatorKind kind) { return std::string(to_string(kind)); }

nlohmann::json position_json(Position3 p) { return nlohmann::json::array({p.x, p.y, p.z}); }

}  // namespace

std::vector<OperatorResult> reconstruct_operators(const Scenario& scenario,
                                                  const MeasurementSet& ms,
                                                  const std::vector<FocusingOperatorKind>& kinds,
                                                  unsigned workers) {
  std::vector<OperatorResult> out;
  for (const auto kind : kinds) {
    OperatorResult r;
    r.kind = kind;
    r.volume = backproject_multi_freq(ms, scenario.grid, kind, {workers});
    if (!r.volume.normalized)
      throw Error(ErrorCode::EmptyImage,
                  "empty image: operator " + op_name(kind) + " produced an all-zero volume");
    out.push_back(std::move(r));
  }
  return out;
}

void compute_metrics(const Scenario& scenario, OperatorResult& result) {
  result.entropy = entropy(result.volume);
  result.artifact_level_db.reset();
  result.targets_resolved = 0;
  result.target_count = 0;
  if (!scenario.has_truth()) return;

  std::vector<Position3> targets;
  for (const auto& s : scenario.scene.scatterers) targets.push_back(s.position);
  const auto mask = target_mask(result.volume.grid, targets, scenario.effective_target_radius());
  bool any = false;
  for (bool m : mask) any |= m;
  if (any) result.artifact_level_db = artifact_level(result.volume, mask);

  result.target_count = targets.size();
  for (const auto& t : targets)
    if (has_local_peak_near(result.volume, t)) ++result.targets_resolved;
}

void write_projections(const std::string& dir, const std::string& stem,
                       const ImageVolume& volume) {
  for (const auto axis : {ProjectionAxis::X, ProjectionAxis::Y, ProjectionAxis::Z}) {
    const Image2D image = mip(volume, axis);
    const std::string base = dir + "/mip_" + stem + "_" + std::string(to_string(axis));
    write_image_png(base + ".png", image);
    write_image_csv(base + ".csv", image);
  }
}

void write_differences(const std::string& dir, const std::vector<OperatorResult>& results) {
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t j = i + 1; j < results.size(); ++j) {
      const DifferenceImage d = diff_image(mip(results[i].volume, ProjectionAxis::Z),
                                           mip(results[j].volume, ProjectionAxis::Z));
      const std::string base = dir + "/diff_" + op_name(results[i].kind) + "_minus_" +
                               op_name(results[j].kind) + "_z";
      write_image_csv(base + ".csv", d);
      write_image_png(base + "_pos.png", d.positive_part());
      write_image_png(base + "_neg.png", d.negative_part());
    }
  }
}

std::string make_report(const Scenario& scenario, const MeasurementSet& ms,
                        const std::vector<OperatorResult>& results) {
  using nlohmann::json;
  json report;
  report["scenario"] = scenario.name;
  report["seed"] = scenario.seed;
  report["measurements"] = {
      {"frequencies", ms.frequency_count()},
      {"pairs_per_frequency", ms.pair_count()},
      {"pairing", ms.pairing == Pairing::FullMatrix ? "full_matrix" : "paired_list"},
      {"f_min_hz", ms.frequencies.empty() ? 0.0 : ms.frequencies.front()},
      {"f_max_hz", ms.frequencies.empty() ? 0.0 : ms.frequencies.back()},
  };
  const auto& g = scenario.grid;
  report["grid"] = {{"origin", position_json(g.origin)},
                    {"spacing", g.spacing},
                    {"dims", g.dims}};
  if (scenario.has_truth()) {
    report["scatterers"] = scenario.scene.scatterers.size();
    report["target_radius_m"] = scenario.effective_target_radius();
  }

  json ops = json::object();
  for (const auto& r : results) {
    json o;
    o["entropy"] = r.entropy;
    o["artifact_level_db"] = r.artifact_level_db ? json(*r.artifact_level_db) : json(nullptr);
    const std::size_t peak = argmax_voxel(r.volume);
    o["peak_position"] = position_json(r.volume.grid.voxel(peak));
    o["peak_index"] = peak;
    o["max_magnitude"] = r.volume.max_magnitude();
    if (scenario.has_truth()) {
      o["targets_resolved"] = r.targets_resolved;
      o["target_count"] = r.target_count;
    }
    ops[op_name(r.kind)] = std::move(o);
  }
  report["operators"] = std::move(ops);

  json diffs = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t j = i + 1; j < results.size(); ++j) {
      json d;
      d["a"] = op_name(results[i].kind);
      d["b"] = op_name(results[j].kind);
      if (results[i].artifact_level_db && results[j].artifact_level_db)
        d["artifact_level_delta_db"] = *results[i].artifact_level_db - *results[j].artifact_level_db;
      d["entropy_delta"] = results[i].entropy - results[j].entropy;
      diffs.push_back(std::move(d));
    }
  }
  report["comparisons"] = std::move(diffs);
  return report.dump(2) + "\n";
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  require_valid(scenario);
  const auto kinds = options.operators.empty() ? scenario.operators : options.operators;

  RunResult result;
  result.output_dir = options.output_dir.empty() ? scenario.output : options.output_dir;
  std::filesystem::create_directories(result.output_dir);

  const MeasurementSet ms = build_measurements(scenario, options.workers);
  result.operators = reconstruct_operators(scenario, ms, kinds, options.workers);
  for (auto& r : result.operators) {
    compute_metrics(scenario, r);
    write_volume(result.output_dir + "/volume_" + op_name(r.kind) + ".nfim", r.volume);
    write_projections(result.output_dir, op_name(r.kind), r.volume);
  }
  write_differences(result.output_dir, result.operators);

  result.report = make_report(scenario, ms, result.operators);
  std::ofstream out(result.output_dir + "/report.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + result.output_dir + "/report.json");
  out << result.report;
  return result;
}

}  // namespace nfbp
