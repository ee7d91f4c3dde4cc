#pragma once

// Declarative imaging scenarios.
//
// A scenario is a YAML document; see scenarios/README.md for the schema.
// Bundled scenarios ("smoke", "fig1_point_scatterers", "rect_dense",
// "sar_plate_like") are compiled in and can be referenced by name.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nfbp/focusing.hpp"
#include "nfbp/forward.hpp"
#include "nfbp/reconstruct.hpp"

namespace nfbp {

enum class LayoutKind { Spiral, Rect, Cluster };

struct ArraySpec {
  LayoutKind kind = LayoutKind::Spiral;
  std::size_t count = 0;  // spiral
  double r_max = 0.0;     // spiral
  std::size_t nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  std::size_t clusters_x = 1, clusters_y = 1, per_edge = 0;  // cluster
  double cluster_size = 0.0, cluster_pitch = 0.0;
  double z = 0.0;  // aperture plane
  std::vector<Position3> sar_shifts;  // one capture per shift; empty = single capture
};

struct FrequencySpec {
  double start_hz = 0.0;
  double stop_hz = 0.0;
  std::size_t count = 0;

  std::vector<double> values() const;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  Scene scene;                         // empty when a dataset is used
  std::optional<std::string> dataset;  // resolved path
  ArraySpec array;
  FrequencySpec frequencies;
  ImageGrid grid;
  std::vector<FocusingOperatorKind> operators;
  std::optional<double> snr_db;
  std::optional<double> target_radius;  // artifact mask radius in meters
  std::string output = "out";

  bool has_truth() const { return !scene.scatterers.empty(); }
  // Target radius in meters; defaults to one wavelength at the centre frequency.
  double effective_target_radius() const;
};

struct Diagnostic {
  std::string path;
  std::string message;
};

// Parses a scenario document. Relative dataset paths resolve against
// `base_dir`. Throws ParseError with line/column for malformed YAML or
// ill-typed fields; semantic problems are left to validate().
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");

// Loads a scenario from a file path or a bundled scenario name.
Scenario load_scenario(const std::string& path_or_name);

std::vector<std::string> bundled_scenario_names();
std::optional<std::string> bundled_scenario_text(const std::string& name);

// Every violated invariant with its field path. Empty means valid.
std::vector<Diagnostic> validate(const Scenario& scenario);

// Throws ValidationError "validation error: <message> (at <path>)" for the
// first diagnostic, if any.
void require_valid(const Scenario& scenario);

// Builds the array layout (all SAR captures concatenated).
ArrayLayout build_layout(const Scenario& scenario);

// Loads or synthesizes the measurement set described by the scenario,
// including SAR merging and noise. Throws ValidationError when invalid.
MeasurementSet build_measurements(const Scenario& scenario, unsigned workers = 0);

}  // namespace nfbp
