#pragma once

// JSON scenario configuration.
//
//   {
//     "kind": "afshar" | "single_slit" | "wheeler" | "spin_toy" | "theorem_check",
//     "slit":  {"epsilon": 0.5, "y0": 5, "amp_a": 0.7071, "amp_b": [re, im],
//               "mass": 1, "hbar": 1},
//     "grid":  {"n_points": 65536, "y_min": -4096, "y_max": 4096},
//     "time":  100,
//     "wires": "auto" | "none" |
//              {"count": 10, "width_fraction": 0.05, "edge_softness": 0.5} |
//              {"positions": [...], "width": 3.1, "edge_softness": 0},
//     "lens":  {"focal_length": 50, "aperture_halfwidth": 1900,
//               "object_distance": 100, "image_distance": 100, "edge_softness": 0.5},
//     "fringe_window": [lo, hi],          // optional; derived from the geometry otherwise
//     "split_point": 0,
//     "open_slit": "a" | "b",             // single_slit only
//     "wheeler": {"momentum": 2, "offset": 20, "epsilon": 4},
//     "spin":    {"field_strength": 1},
//     "theorem": {"trials": 1000, "dim": 3},
//     "seed": 0,
//     "output_dir": "runs/afshar",
//     "csv_stride": 4
//   }
//
// Missing keys take the defaults of the chosen kind.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "whichway/optics_bench.hpp"
#include "whichway/wavepacket.hpp"

namespace whichway {

enum class ScenarioKind { spin_toy, theorem_check, afshar, single_slit, wheeler };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

/// Wires built from the measured fringe map.
struct AutoWires {
  std::size_t count = 10;
  double width_fraction = 0.05;
  double edge_softness = 0.5;
};

struct WireSpec {
  enum class Mode { none, automatic, fixed };
  Mode mode = Mode::automatic;
  AutoWires automatic;
  WireGrid fixed;
};

/// Two packets launched towards each other; slit A starts at +offset and
/// moves towards -y.
struct WheelerGeometry {
  double momentum = 2.0;
  double offset = 20.0;
  double epsilon = 4.0;

  double crossing_time(double mass, double hbar) const { return offset * mass / (hbar * momentum); }
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::afshar;
  SlitConfig slit;
  Grid grid;
  double time = 100.0;
  WireSpec wires;
  LensSpec lens;
  std::optional<Interval> fringe_window;
  double split_point = 0.0;
  char open_slit = 'a';
  WheelerGeometry wheeler;
  double field_strength = 1.0;
  int theorem_trials = 1000;
  int theorem_dim = 3;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::size_t csv_stride = 4;

  /// Checks every field relevant to `kind`; throws a validation Error.
  void validate() const;
};

/// Defaults for each kind (the Wheeler grid is finer and narrower).
ScenarioConfig default_config(ScenarioKind kind);

ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& cfg);

/// Fringe window used when the config does not give one: the far-field
/// fringe period pi hbar t / (m y0) times (count/2 + 1/4) either side of 0.
Interval default_fringe_window(const ScenarioConfig& cfg);

}  // namespace whichway
