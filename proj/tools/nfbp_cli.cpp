// nfbp: scenario-driven near-field back-projection.
//
//   nfbp validate    --scenario <file|name>
//   nfbp synth       --scenario <file|name> --out <dir> [--format csv|bin]
//   nfbp reconstruct --scenario <file|name> [--dataset <file>] --out <dir> [--operator <op>]...
//   nfbp project     --volume <file.nfim> --out <dir>
//   nfbp metrics     --volume <file.nfim> [--scenario <file|name>]
//   nfbp run         --scenario <file|name> [--out <dir>] [--operator <op>]...

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

#include "nfbp/error.hpp"
#include "nfbp/pipeline.hpp"

namespace {

std::vector<nfbp::FocusingOperatorKind> parse_operators(const std::vector<std::string>& names) {
  std::vector<nfbp::FocusingOperatorKind> out;
  for (const auto& n : names) {
    const auto kind = nfbp::parse_operator_kind(n);
    if (!kind)
      throw nfbp::Error(nfbp::ErrorCode::InvalidArgument,
                        "unknown operator '" + n + "' (expected PhaseOnly, F0, F1 or F2)");
    out.push_back(*kind);
  }
  return out;
}

std::string stem_of(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  if (stem.rfind("volume_", 0) == 0) stem = stem.substr(7);
  return stem;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field back-projection imaging with amplitude-corrected focusing operators"};
  app.require_subcommand(1);

  std::string scenario_arg, out_dir, format = "bin", dataset, volume_path;
  unsigned workers = 0;
  std::vector<std::string> operator_names;

  auto add_scenario = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--scenario", scenario_arg, "Scenario file or bundled name");
    if (required) opt->required();
  };
  auto add_workers = [&](CLI::App* cmd) {
    cmd->add_option("--workers", workers, "Worker threads (0 = auto)");
  };
  auto add_operators = [&](CLI::App* cmd) {
    cmd->add_option("--operator", operator_names, "PhaseOnly, F0, F1 or F2 (repeatable)");
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario and list every problem");
  add_scenario(validate_cmd, true);

  auto* synth_cmd = app.add_subcommand("synth", "Synthesize the scenario's measurement set");
  add_scenario(synth_cmd, true);
  synth_cmd->add_option("--out", out_dir, "Output directory")->required();
  synth_cmd->add_option("--format", format, "Dataset format")
      ->check(CLI::IsMember({"csv", "bin"}));
  add_workers(synth_cmd);

  auto* recon_cmd = app.add_subcommand("reconstruct", "Back-project into the scenario grid");
  add_scenario(recon_cmd, true);
  recon_cmd->add_option("--dataset", dataset, "Measurement file (.csv or .nfbp)");
  recon_cmd->add_option("--out", out_dir, "Output directory")->required();
  add_workers(recon_cmd);
  add_operators(recon_cmd);

  auto* project_cmd = app.add_subcommand("project", "Maximum intensity projections of a volume");
  project_cmd->add_option("--volume", volume_path, "Volume file (.nfim)")->required();
  project_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* metrics_cmd = app.add_subcommand("metrics", "Entropy and artifact level of a volume");
  metrics_cmd->add_option("--volume", volume_path, "Volume file (.nfim)")->required();
  add_scenario(metrics_cmd, false);

  auto* run_cmd = app.add_subcommand("run", "Full pipeline with report");
  add_scenario(run_cmd, true);
  run_cmd->add_option("--out", out_dir, "Output directory (default: scenario output)");
  add_workers(run_cmd);
  add_operators(run_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate_cmd) {
      const auto scenario = nfbp::load_scenario(scenario_arg);
      const auto diagnostics = nfbp::validate(scenario);
      if (diagnostics.empty()) {
        std::cout << "ok\n";
        return 0;
      }
      for (const auto& d : diagnostics) std::cout << d.path << ": " << d.message << '\n';
      return 1;
    }

    if (*synth_cmd) {
      const auto scenario = nfbp::load_scenario(scenario_arg);
      if (scenario.dataset)
        throw nfbp::Error(nfbp::ErrorCode::InvalidArgument,
                          "scenario loads a dataset; nothing to synthesize");
      const auto ms = nfbp::build_measurements(scenario, workers);
      std::filesystem::create_directories(out_dir);
      const std::string path =
          out_dir + (format == "csv" ? "/measurements.csv" : "/measurements.nfbp");
      if (format == "csv")
        nfbp::write_measurements_csv(path, ms);
      else
        nfbp::write_measurements_bin(path, ms);
      nfbp::write_layout_csv(out_dir + "/layout.csv", ms.layout);
      std::cout << path << '\n';
      return 0;
    }

    if (*recon_cmd) {
      auto scenario = nfbp::load_scenario(scenario_arg);
      if (!dataset.empty()) scenario.dataset = dataset;
      nfbp::require_valid(scenario);
      auto kinds = parse_operators(operator_names);
      if (kinds.empty()) kinds = scenario.operators;
      const auto ms = nfbp::build_measurements(scenario, workers);
      std::filesystem::create_directories(out_dir);
      for (const auto& r : nfbp::reconstruct_operators(scenario, ms, kinds, workers)) {
        const std::string path =
            out_dir + "/volume_" + std::string(nfbp::to_string(r.kind)) + ".nfim";
        nfbp::write_volume(path, r.volume);
        std::cout << path << '\n';
      }
      return 0;
    }

    if (*project_cmd) {
      const auto volume = nfbp::read_volume(volume_path);
      std::filesystem::create_directories(out_dir);
      nfbp::write_projections(out_dir, stem_of(volume_path), volume);
      return 0;
    }

    if (*metrics_cmd) {
      nfbp::OperatorResult r;
      r.volume = nfbp::read_volume(volume_path);
      nfbp::Scenario scenario;
      if (!scenario_arg.empty()) scenario = nfbp::load_scenario(scenario_arg);
      nfbp::compute_metrics(scenario, r);
      nlohmann::json j;
      j["entropy"] = r.entropy;
      j["artifact_level_db"] =
          r.artifact_level_db ? nlohmann::json(*r.artifact_level_db) : nlohmann::json(nullptr);
      j["max_magnitude"] = r.volume.max_magnitude();
      if (scenario.has_truth()) {
        j["targets_resolved"] = r.targets_resolved;
        j["target_count"] = r.target_count;
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*run_cmd) {
      const auto scenario = nfbp::load_scenario(scenario_arg);
      nfbp::RunOptions options;
      options.output_dir = out_dir;
      options.workers = workers;
      options.operators = parse_operators(operator_names);
      const auto result = nfbp::run(scenario, options);
      std::cout << result.report;
      return 0;
    }
  } catch (const nfbp::Error& e) {
    if (e.code() == nfbp::ErrorCode::ValidationError)
      std::cerr << e.what() << '\n';
    else
      std::cerr << "error (" << nfbp::to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
