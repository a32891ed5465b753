#include "whichway/scenario_config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "whichway/error.hpp"

namespace whichway {

namespace {

constexpr const char* kModule = "scenarios_cli";

using nlohmann::json;

Complex parse_amplitude(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw validation_error(kModule, "amplitude must be a number or [re, im]");
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw validation_error(kModule, std::string("bad value for '") + key + "': " + e.what());
  }
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw validation_error(kModule, std::string(what) + " must be an object");
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::spin_toy: return "spin_toy";
    case ScenarioKind::theorem_check: return "theorem_check";
    case ScenarioKind::afshar: return "afshar";
    case ScenarioKind::single_slit: return "single_slit";
    case ScenarioKind::wheeler: return "wheeler";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  for (ScenarioKind k : {ScenarioKind::spin_toy, ScenarioKind::theorem_check, ScenarioKind::afshar,
                         ScenarioKind::single_slit, ScenarioKind::wheeler}) {
    if (to_string(k) == name) return k;
  }
  throw validation_error(kModule, "unknown scenario kind '" + name + "'");
}

ScenarioConfig default_config(ScenarioKind kind) {
  ScenarioConfig cfg;
  cfg.kind = kind;
  if (kind == ScenarioKind::single_slit) {
    cfg.slit.amp_a = 1.0;
    cfg.slit.amp_b = 0.0;
  }
  if (kind == ScenarioKind::wheeler) {
    cfg.grid = Grid{16384, -128.0, 128.0};
    cfg.wires.automatic.edge_softness = 0.0;
  }
  return cfg;
}

Interval default_fringe_window(const ScenarioConfig& cfg) {
  const double count = static_cast<double>(
      cfg.wires.mode == WireSpec::Mode::automatic ? cfg.wires.automatic.count : 10);
  if (cfg.kind == ScenarioKind::wheeler) {
    // Counter-propagating plane waves of wavenumber +-k beat with period pi / k.
    const double period = std::numbers::pi / cfg.wheeler.momentum;
    const double half = (count / 2.0 + 0.25) * period;
    return {-half, half};
  }
  const double period = std::numbers::pi * cfg.slit.hbar * cfg.time / (cfg.slit.mass * cfg.slit.y0);
  const double half = (count / 2.0 + 0.25) * period;
  return {-half, half};
}

void ScenarioConfig::validate() const {
  grid.validate();
  if (csv_stride == 0) throw validation_error(kModule, "csv_stride must be at least 1");
  switch (kind) {
    case ScenarioKind::spin_toy:
      if (!(field_strength > 0.0)) throw validation_error(kModule, "spin field strength must be positive");
      return;
    case ScenarioKind::theorem_check:
      if (theorem_trials < 1) throw validation_error(kModule, "theorem trials must be at least 1");
      if (theorem_dim < 3) throw validation_error(kModule, "theorem dimension must be at least 3");
      return;
    case ScenarioKind::wheeler:
      if (!(wheeler.momentum > 0.0) || !(wheeler.offset > 0.0) || !(wheeler.epsilon > 0.0)) {
        throw validation_error(kModule, "wheeler momentum, offset and epsilon must be positive");
      }
      if (!(slit.mass > 0.0) || !(slit.hbar > 0.0)) throw validation_error(kModule, "mass and hbar must be positive");
      break;
    case ScenarioKind::afshar:
    case ScenarioKind::single_slit:
      slit.validate();
      lens.validate();
      if (!(time > 0.0)) throw validation_error(kModule, "time must be positive");
      if (std::abs(lens.object_distance - time) > 1e-9 * std::max(1.0, time)) {
        throw validation_error(kModule, "lens object distance must equal the propagation time");
      }
      if (kind == ScenarioKind::single_slit && open_slit != 'a' && open_slit != 'b') {
        throw validation_error(kModule, "open_slit must be 'a' or 'b'");
      }
      if (kind == ScenarioKind::afshar && wires.mode == WireSpec::Mode::automatic &&
          (std::abs(slit.amp_a) == 0.0 || std::abs(slit.amp_b) == 0.0)) {
        throw validation_error(kModule, "automatic wires need both slits open");
      }
      break;
  }
  if (wires.mode == WireSpec::Mode::automatic) {
    const AutoWires& w = wires.automatic;
    if (w.count < 1) throw validation_error(kModule, "automatic wire count must be at least 1");
    if (!(w.width_fraction > 0.0 && w.width_fraction < 0.5)) {
      throw validation_error(kModule, "wire width fraction must lie in (0, 0.5)");
    }
    if (!(w.edge_softness >= 0.0)) throw validation_error(kModule, "edge softness must be non-negative");
  }
  if (wires.mode == WireSpec::Mode::fixed) wires.fixed.validate();
  if (fringe_window && !(fringe_window->hi > fringe_window->lo)) {
    throw validation_error(kModule, "fringe window must satisfy lo < hi");
  }
}

ScenarioConfig parse_config(const json& doc) {
  require_object(doc, "config");
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    throw validation_error(kModule, "config needs a string 'kind'");
  }
  ScenarioConfig cfg = default_config(scenario_kind_from_string(doc["kind"].get<std::string>()));

  if (doc.contains("slit")) {
    const json& s = doc["slit"];
    require_object(s, "slit");
    read(s, "epsilon", cfg.slit.epsilon);
    read(s, "y0", cfg.slit.y0);
    read(s, "mass", cfg.slit.mass);
    read(s, "hbar", cfg.slit.hbar);
    if (s.contains("amp_a")) cfg.slit.amp_a = parse_amplitude(s["amp_a"]);
    if (s.contains("amp_b")) cfg.slit.amp_b = parse_amplitude(s["amp_b"]);
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    require_object(g, "grid");
    read(g, "n_points", cfg.grid.n_points);
    read(g, "y_min", cfg.grid.y_min);
    read(g, "y_max", cfg.grid.y_max);
  }
  read(doc, "time", cfg.time);
  bool lens_object_given = false;
  if (doc.contains("lens")) {
    const json& l = doc["lens"];
    require_object(l, "lens");
    read(l, "focal_length", cfg.lens.focal_length);
    read(l, "aperture_halfwidth", cfg.lens.aperture_halfwidth);
    read(l, "edge_softness", cfg.lens.edge_softness);
    lens_object_given = l.contains("object_distance");
    read(l, "object_distance", cfg.lens.object_distance);
    if (!lens_object_given) cfg.lens.object_distance = cfg.time;
    if (l.contains("image_distance")) {
      read(l, "image_distance", cfg.lens.image_distance);
    } else if (cfg.lens.object_distance > cfg.lens.focal_length && cfg.lens.focal_length > 0.0) {
      cfg.lens.image_distance = 1.0 / (1.0 / cfg.lens.focal_length - 1.0 / cfg.lens.object_distance);
    }
  } else if (doc.contains("time") && cfg.time > 0.0) {
    // Keep unit magnification for a bare time override.
    cfg.lens = LensSpec{cfg.time / 2.0, cfg.lens.aperture_halfwidth, cfg.time, cfg.time, cfg.lens.edge_softness};
  }
  if (doc.contains("wires")) {
    const json& w = doc["wires"];
    if (w.is_null() || (w.is_string() && w.get<std::string>() == "none")) {
      cfg.wires.mode = WireSpec::Mode::none;
    } else if (w.is_string() && w.get<std::string>() == "auto") {
      cfg.wires.mode = WireSpec::Mode::automatic;
    } else if (w.is_object() && w.contains("positions")) {
      cfg.wires.mode = WireSpec::Mode::fixed;
      read(w, "positions", cfg.wires.fixed.positions);
      read(w, "width", cfg.wires.fixed.width);
      read(w, "edge_softness", cfg.wires.fixed.edge_softness);
    } else if (w.is_object()) {
      cfg.wires.mode = WireSpec::Mode::automatic;
      read(w, "count", cfg.wires.automatic.count);
      read(w, "width_fraction", cfg.wires.automatic.width_fraction);
      read(w, "edge_softness", cfg.wires.automatic.edge_softness);
    } else {
      throw validation_error(kModule, "wires must be \"auto\", \"none\", null or an object");
    }
  }
  if (doc.contains("fringe_window") && !doc["fringe_window"].is_null()) {
    const json& fw = doc["fringe_window"];
    if (!fw.is_array() || fw.size() != 2 || !fw[0].is_number() || !fw[1].is_number()) {
      throw validation_error(kModule, "fringe_window must be [lo, hi]");
    }
    cfg.fringe_window = Interval{fw[0].get<double>(), fw[1].get<double>()};
  }
  read(doc, "split_point", cfg.split_point);
  if (doc.contains("open_slit")) {
    std::string s;
    read(doc, "open_slit", s);
    if (s != "a" && s != "b") throw validation_error(kModule, "open_slit must be \"a\" or \"b\"");
    cfg.open_slit = s[0];
  }
  if (doc.contains("wheeler")) {
    const json& w = doc["wheeler"];
    require_object(w, "wheeler");
    read(w, "momentum", cfg.wheeler.momentum);
    read(w, "offset", cfg.wheeler.offset);
    read(w, "epsilon", cfg.wheeler.epsilon);
  }
  if (doc.contains("spin")) {
    require_object(doc["spin"], "spin");
    read(doc["spin"], "field_strength", cfg.field_strength);
  }
  if (doc.contains("theorem")) {
    require_object(doc["theorem"], "theorem");
    read(doc["theorem"], "trials", cfg.theorem_trials);
    read(doc["theorem"], "dim", cfg.theorem_dim);
  }
  read(doc, "seed", cfg.seed);
  read(doc, "output_dir", cfg.output_dir);
  read(doc, "csv_stride", cfg.csv_stride);
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error(kModule, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error(kModule, "cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

json to_json(const ScenarioConfig& cfg) {
  auto amplitude = [](Complex z) { return json::array({z.real(), z.imag()}); };
  json j;
  j["kind"] = to_string(cfg.kind);
  j["slit"] = {{"epsilon", cfg.slit.epsilon},   {"y0", cfg.slit.y0},
               {"amp_a", amplitude(cfg.slit.amp_a)}, {"amp_b", amplitude(cfg.slit.amp_b)},
               {"mass", cfg.slit.mass},         {"hbar", cfg.slit.hbar}};
  j["grid"] = {{"n_points", cfg.grid.n_points}, {"y_min", cfg.grid.y_min}, {"y_max", cfg.grid.y_max}};
  j["time"] = cfg.time;
  switch (cfg.wires.mode) {
    case WireSpec::Mode::none: j["wires"] = "none"; break;
    case WireSpec::Mode::automatic:
      j["wires"] = {{"count", cfg.wires.automatic.count},
                    {"width_fraction", cfg.wires.automatic.width_fraction},
                    {"edge_softness", cfg.wires.automatic.edge_softness}};
      break;
    case WireSpec::Mode::fixed:
      j["wires"] = {{"positions", cfg.wires.fixed.positions},
                    {"width", cfg.wires.fixed.width},
                    {"edge_softness", cfg.wires.fixed.edge_softness}};
      break;
  }
  j["lens"] = {{"focal_length", cfg.lens.focal_length},
               {"aperture_halfwidth", cfg.lens.aperture_halfwidth},
               {"object_distance", cfg.lens.object_distance},
               {"image_distance", cfg.lens.image_distance},
               {"edge_softness", cfg.lens.edge_softness}};
  j["fringe_window"] = cfg.fringe_window
                           ? json::array({cfg.fringe_window->lo, cfg.fringe_window->hi})
                           : json(nullptr);
  j["split_point"] = cfg.split_point;
  j["open_slit"] = std::string(1, cfg.open_slit);
  j["wheeler"] = {{"momentum", cfg.wheeler.momentum},
                  {"offset", cfg.wheeler.offset},
                  {"epsilon", cfg.wheeler.epsilon}};
  j["spin"] = {{"field_strength", cfg.field_strength}};
  j["theorem"] = {{"trials", cfg.theorem_trials}, {"dim", cfg.theorem_dim}};
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["csv_stride"] = cfg.csv_stride;
  return j;
}

}  // namespace whichway
