#pragma once

// End-to-end orchestration behind the `nfbp` command-line tool.

#include <optional>
#include <string>
#include <vector>

#include "nfbp/metrics.hpp"
#include "nfbp/scenario.hpp"

namespace nfbp {

struct OperatorResult {
  FocusingOperatorKind kind = FocusingOperatorKind::PhaseOnly;
  ImageVolume volume;
  double entropy = 0.0;
  std::optional<double> artifact_level_db;  // only with scene truth
  std::size_t targets_resolved = 0;         // scatterers with a local peak within one voxel
  std::size_t target_count = 0;
};

struct RunOptions {
  std::string output_dir;  // empty = scenario.output
  unsigned workers = 0;
  std::vector<FocusingOperatorKind> operators;  // empty = scenario.operators
};

struct RunResult {
  std::string output_dir;
  std::vector<OperatorResult> operators;
  std::string report;  // contents of report.json
};

// Reconstructs one normalized volume per operator from a measurement set.
std::vector<OperatorResult> reconstruct_operators(const Scenario& scenario,
                                                  const MeasurementSet& ms,
                                                  const std::vector<FocusingOperatorKind>& kinds,
                                                  unsigned workers);

// Fills entropy and, when the scenario carries scatterers, artifact level and
// resolved-target counts.
void compute_metrics(const Scenario& scenario, OperatorResult& result);

// mip_<stem>_<axis>.png (+ .png.txt sidecar) and .csv for x, y and z.
void write_projections(const std::string& dir, const std::string& stem,
                       const ImageVolume& volume);

// diff_<a>_minus_<b>_z.csv plus _pos.png / _neg.png for every operator pair.
void write_differences(const std::string& dir, const std::vector<OperatorResult>& results);

// Machine-readable report; keys sorted, no timings, so identical inputs give
// identical bytes.
std::string make_report(const Scenario& scenario, const MeasurementSet& ms,
                        const std::vector<OperatorResult>& results);

// Full pipeline. Throws ValidationError ("validation error: <message> (at
// <path>)") when the scenario is invalid.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace nfbp
