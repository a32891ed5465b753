#pragma once

// Named end-to-end pipelines and their reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "whichway/optics_bench.hpp"
#include "whichway/scenario_config.hpp"
#include "whichway/wavepacket.hpp"

namespace whichway {

struct Provenance {
  std::string version;
  std::string parameter_hash;           // of the canonical config JSON
  std::string fringe_map_hash;          // of the fringe positions the wires were built from
  std::string fringe_source_hash;       // config hash of the run that produced that map
  double wall_time_seconds = 0.0;
};

struct RunReport {
  ScenarioConfig config;
  std::optional<FringeMap> fringes;
  std::optional<WireGrid> wires;
  std::optional<DetectorReport> detector;           // with wires, when any
  std::optional<DetectorReport> detector_no_wires;  // reference run without wires
  std::optional<ModeContributions> modes;
  nlohmann::json metrics = nlohmann::json::object();  // name -> number or null
  nlohmann::json details = nlohmann::json::object();  // scenario-specific blocks
  Provenance provenance;

  // Profiles kept for CSV export; not serialized into report.json.
  std::optional<BranchedField> pre_lens;
  std::optional<BranchedField> image_plane;

  /// Metric by name; throws if absent or null.
  double metric(const std::string& name) const;
};

RunReport run_scenario(const ScenarioConfig& cfg);

/// Fringe map of the pre-lens field for an afshar-like config (both slits).
FringeMap measure_fringes(const ScenarioConfig& cfg);

/// FNV-1a 64 of a string, as 16 hex digits.
std::string stable_hash(const std::string& text);
std::string config_hash(const ScenarioConfig& cfg);
std::string fringe_hash(const FringeMap& map);

nlohmann::json to_json(const FringeMap& map);
nlohmann::json to_json(const DetectorReport& report);
nlohmann::json to_json(const RunReport& report);

/// JSON text with every floating-point number printed to 17 significant
/// digits. Keys keep nlohmann's sorted order.
std::string dump_json(const nlohmann::json& value, int indent = 2);

/// Directory for a run: `output_dir` resolved against $WHICHWAY_OUTPUT_ROOT
/// when that is set.
std::filesystem::path resolve_output_dir(const std::string& output_dir);

/// report.json plus intensity CSVs, each written to a temporary file and
/// renamed into place.
void write_run_outputs(const RunReport& report, const std::filesystem::path& dir);

enum class SweepParameter { wire_width_fraction, wire_count, time, amplitude_ratio, lens_aperture };

SweepParameter sweep_parameter_from_string(const std::string& name);
std::string to_string(SweepParameter p);

/// Config with one parameter replaced. amplitude_ratio sets |a|^2 (and
/// |b|^2 = 1 - |a|^2); time also moves the lens to the new plane with unit
/// magnification.
ScenarioConfig with_parameter(const ScenarioConfig& cfg, SweepParameter p, double value);

struct SweepEntry {
  double value = 0.0;
  std::optional<RunReport> report;
  std::string error;  // empty on success
};

/// One independent run per value; failures are recorded per entry.
std::vector<SweepEntry> sweep(const ScenarioConfig& cfg, SweepParameter p,
                              const std::vector<double>& values);

/// `value,status,blocked_flux,D,V,I,D_mode,I_mode,error`.
std::string sweep_csv(const std::vector<SweepEntry>& entries);

}  // namespace whichway
