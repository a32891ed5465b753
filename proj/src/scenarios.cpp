#include "whichway/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "whichway/error.hpp"
#include "whichway/orthogonality_theorem.hpp"
#include "whichway/spin_interferometer.hpp"
#include "whichway/whichway_metrics.hpp"

#ifndef WHICHWAY_VERSION
#define WHICHWAY_VERSION "dev"
#endif

namespace whichway {

namespace {

constexpr const char* kModule = "scenarios_cli";

using nlohmann::json;

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Eigen::Matrix2cd& m) {
  json rows = json::array();
  for (int r = 0; r < 2; ++r) rows.push_back(json::array({complex_json(m(r, 0)), complex_json(m(r, 1))}));
  return rows;
}

json spin_json(const spin::SpinState<double>& s) {
  return {{"up", complex_json(s(0))}, {"down", complex_json(s(1))}};
}

json branched_spin_json(const spin::BranchedSpinState<double>& s) {
  return {{"from_up", spin_json(s.from_up)}, {"from_down", spin_json(s.from_down)}};
}

json mode_json(const ModeContributions& mc) {
  return {{"raw", matrix_json(mc.raw)},
          {"surviving", matrix_json(mc.surviving)},
          {"residual", json::array({mc.residual(0), mc.residual(1)})},
          {"gram_condition", mc.gram_condition}};
}

json wires_json(const WireGrid& w) {
  return {{"positions", w.positions}, {"width", w.width}, {"edge_softness", w.edge_softness}};
}

double relative_change(double value, double reference) {
  return reference != 0.0 ? std::abs(value - reference) / reference : 0.0;
}

// Metric that may be undefined for the configuration (e.g. one slit closed).
template <typename F>
json optional_metric(F&& compute) {
  try {
    return json(compute());
  } catch (const Error&) {
    return json(nullptr);
  }
}

double fraction_in_da(const DetectorReport& r, bool branch_a) {
  const double da = branch_a ? r.p_da_from_a : r.p_da_from_b;
  const double db = branch_a ? r.p_db_from_a : r.p_db_from_b;
  return da + db > 0.0 ? da / (da + db) : 0.0;
}

FluxLedger input_ledger(const BranchedField& field) {
  FluxLedger l;
  l.norm_in_a = field.a.norm();
  l.norm_in_b = field.b.norm();
  l.norm_in_total = field.total().norm();
  return l;
}

void add_blocked(FluxLedger& l, const MaskResult& m) {
  l.blocked_a = m.blocked_a;
  l.blocked_b = m.blocked_b;
  l.blocked_total = m.blocked_total;
}

void add_leaked(FluxLedger& l, const LensResult& lr) {
  l.leaked_a = lr.aperture_loss_a;
  l.leaked_b = lr.aperture_loss_b;
  l.leaked_total = lr.aperture_loss_total;
}

struct LensRun {
  DetectorReport report;
  BranchedField image;
};

LensRun lens_and_detect(const ScenarioConfig& cfg, const BranchedField& pre_lens, const FluxLedger& base,
                        const MaskResult* mask) {
  FluxLedger ledger = base;
  if (mask) add_blocked(ledger, *mask);
  LensResult lr = image_through_lens(mask ? mask->field : pre_lens, cfg.lens, cfg.slit.mass, cfg.slit.hbar);
  add_leaked(ledger, lr);
  // A real image is inverted, so slit A (at +y0) lands below the axis.
  const Side da_side = cfg.lens.magnification() < 0.0 ? Side::below : Side::above;
  return {detect(lr.field, cfg.split_point, ledger, da_side), std::move(lr.field)};
}

WireGrid build_wires(const ScenarioConfig& cfg, const FringeMap& all, const Interval& window) {
  if (cfg.wires.mode == WireSpec::Mode::fixed) return cfg.wires.fixed;
  const AutoWires& w = cfg.wires.automatic;
  return wires_on_fringes(all, w.count, w.width_fraction, window.center(), w.edge_softness);
}

RunReport run_afshar(const ScenarioConfig& cfg) {
  RunReport rep;
  rep.config = cfg;
  const BranchedField field = propagate_analytic(initial_state(cfg.slit, cfg.grid), cfg.time);
  const Interval window = cfg.fringe_window.value_or(default_fringe_window(cfg));
  const FringeMap all = find_dark_fringes(field, window);
  const double vis = visibility(field.total().intensity(), field.grid(), window);
  const ModeContributions modes = mode_contributions(field);
  const FluxLedger base = input_ledger(field);

  LensRun clear = lens_and_detect(cfg, field, base, nullptr);
  rep.detector_no_wires = clear.report;
  rep.fringes = cfg.wires.mode == WireSpec::Mode::automatic
                    ? central_fringes(all, cfg.wires.automatic.count, window.center())
                    : all;

  std::optional<LensRun> wired;
  std::optional<MaskResult> mask;
  if (cfg.wires.mode != WireSpec::Mode::none) {
    rep.wires = build_wires(cfg, all, window);
    mask = apply_wires(field, *rep.wires);
    wired = lens_and_detect(cfg, field, base, &*mask);
  }
  const DetectorReport& det = wired ? wired->report : clear.report;
  rep.detector = det;
  rep.modes = modes;
  rep.pre_lens = field;
  rep.image_plane = wired ? wired->image : clear.image;

  const ConditionalStats det_stats = stats_from_detectors(det);
  const ConditionalStats clear_stats = stats_from_detectors(clear.report);
  const ConditionalStats mode_stats = stats_from_modes(modes);
  const double d_mode = distinguishability(mode_stats);
  json& m = rep.metrics;
  m["visibility"] = vis;
  m["fringe_spacing"] = all.fringe_spacing;
  m["blocked_flux"] = det.blocked_flux;
  m["blocked_flux_a"] = det.ledger.blocked_a;
  m["blocked_flux_b"] = det.ledger.blocked_b;
  m["leaked_flux"] = det.leaked_flux;
  m["total_change_da"] = relative_change(det.p_da_total, clear.report.p_da_total);
  m["total_change_db"] = relative_change(det.p_db_total, clear.report.p_db_total);
  m["D"] = distinguishability(det_stats);
  m["D_unrenormalized"] = distinguishability(det_stats, Renormalization::none);
  m["I"] = mutual_information(det_stats);
  m["D_no_wires"] = distinguishability(clear_stats);
  m["I_no_wires"] = mutual_information(clear_stats);
  m["D_mode"] = d_mode;
  m["I_mode"] = mutual_information(mode_stats);
  m["mode_row_difference"] = (modes.surviving.row(0) - modes.surviving.row(1)).cwiseAbs().maxCoeff();
  m["duality_budget"] = duality_budget(vis, d_mode);
  return rep;
}

RunReport run_single_slit(const ScenarioConfig& cfg) {
  ScenarioConfig reference = cfg;
  reference.kind = ScenarioKind::afshar;
  reference.slit.amp_a = reference.slit.amp_b = 1.0 / std::numbers::sqrt2;
  ScenarioConfig single = cfg;
  single.slit.amp_a = cfg.open_slit == 'a' ? 1.0 : 0.0;
  single.slit.amp_b = cfg.open_slit == 'a' ? 0.0 : 1.0;

  RunReport rep;
  rep.config = cfg;
  const BranchedField field = propagate_analytic(initial_state(single.slit, single.grid), single.time);
  const FluxLedger base = input_ledger(field);
  LensRun clear = lens_and_detect(single, field, base, nullptr);
  rep.detector_no_wires = clear.report;
  rep.modes = mode_contributions(field);
  rep.pre_lens = field;

  std::optional<LensRun> wired;
  double reference_blocked = 0.0;
  if (cfg.wires.mode != WireSpec::Mode::none) {
    // Wires stay where the two-slit dark fringes were; they are not re-fitted
    // to the single-slit pattern.
    const RunReport ref = run_afshar(reference);
    rep.fringes = ref.fringes;
    rep.wires = ref.wires;
    reference_blocked = ref.metric("blocked_flux");
    rep.provenance.fringe_map_hash = fringe_hash(*ref.fringes);
    rep.provenance.fringe_source_hash = config_hash(reference);
    const MaskResult mask = apply_wires(field, *rep.wires);
    wired = lens_and_detect(single, field, base, &mask);
  }
  const DetectorReport& det = wired ? wired->report : clear.report;
  rep.detector = det;
  rep.image_plane = wired ? wired->image : clear.image;

  const bool open_a = cfg.open_slit == 'a';
  json& m = rep.metrics;
  m["blocked_flux"] = det.blocked_flux;
  m["reference_blocked_flux"] = reference_blocked;
  m["blocked_ratio"] = reference_blocked > 0.0 ? json(det.blocked_flux / reference_blocked) : json(nullptr);
  m["leaked_flux"] = det.leaked_flux;
  // Share of the surviving flux that reaches the detector imaging the open slit.
  const double fid_clear = open_a ? fraction_in_da(clear.report, true) : 1.0 - fraction_in_da(clear.report, false);
  const double fid_wired = open_a ? fraction_in_da(det, true) : 1.0 - fraction_in_da(det, false);
  m["imaging_fidelity_no_wires"] = fid_clear;
  m["imaging_fidelity"] = fid_wired;
  m["visibility"] = optional_metric([&] {
    return visibility(field.total().intensity(), field.grid(), default_fringe_window(reference));
  });
  m["D"] = optional_metric([&] { return distinguishability(stats_from_detectors(det)); });
  m["I"] = optional_metric([&] { return mutual_information(stats_from_detectors(det)); });
  return rep;
}

RunReport run_wheeler(const ScenarioConfig& cfg) {
  const WheelerGeometry& g = cfg.wheeler;
  const double mass = cfg.slit.mass;
  const double hbar = cfg.slit.hbar;
  RunReport rep;
  rep.config = cfg;
  BranchedField start;
  start.a = gaussian_packet(cfg.grid, g.offset, g.epsilon, -g.momentum, cfg.slit.amp_a);
  start.b = gaussian_packet(cfg.grid, -g.offset, g.epsilon, g.momentum, cfg.slit.amp_b);
  const FluxLedger base = input_ledger(start);
  const BranchedField crossing = propagate_spectral(start, g.crossing_time(mass, hbar), mass, hbar);

  const Interval window = cfg.fringe_window.value_or(default_fringe_window(cfg));
  const FringeMap all = find_dark_fringes(crossing, window);
  const double vis = visibility(crossing.total().intensity(), crossing.grid(), window);
  const DetectorReport clear = detect_far_field(crossing, base);
  rep.detector_no_wires = clear;
  rep.pre_lens = crossing;
  rep.fringes = cfg.wires.mode == WireSpec::Mode::automatic
                    ? central_fringes(all, cfg.wires.automatic.count, window.center())
                    : all;

  DetectorReport det = clear;
  if (cfg.wires.mode != WireSpec::Mode::none) {
    rep.wires = build_wires(cfg, all, window);
    const MaskResult mask = apply_wires(crossing, *rep.wires);
    FluxLedger ledger = base;
    add_blocked(ledger, mask);
    det = detect_far_field(mask.field, ledger);
  }
  rep.detector = det;

  json& m = rep.metrics;
  m["crossing_time"] = g.crossing_time(mass, hbar);
  m["visibility"] = vis;
  m["fringe_spacing"] = all.fringe_spacing;
  m["blocked_flux"] = det.blocked_flux;
  m["D"] = distinguishability(stats_from_detectors(det));
  m["I"] = mutual_information(stats_from_detectors(det));
  m["D_no_wires"] = distinguishability(stats_from_detectors(clear));
  m["I_no_wires"] = mutual_information(stats_from_detectors(clear));
  m["total_change_da"] = relative_change(det.p_da_total, clear.p_da_total);
  m["total_change_db"] = relative_change(det.p_db_total, clear.p_db_total);
  return rep;
}

RunReport run_spin_toy(const ScenarioConfig& cfg) {
  const spin::SpinEvolver<double> evolver(cfg.field_strength);
  const auto p = spin::run_pipeline(evolver);
  RunReport rep;
  rep.config = cfg;
  rep.details["spin"] = {{"tau", evolver.tau()},
                         {"interference", branched_spin_json(p.interference)},
                         {"projected", branched_spin_json(p.projected)},
                         {"final", branched_spin_json(p.final)},
                         {"unprojected", branched_spin_json(p.unprojected)}};
  const auto [up_a, down_a] = spin::click_probabilities(p.final.from_up);
  const auto [up_b, down_b] = spin::click_probabilities(p.final.from_down);
  ConditionalStats clicks;
  clicks.given_a = {up_a, down_a};
  clicks.given_b = {up_b, down_b};
  json& m = rep.metrics;
  m["which_initial_state_info"] = spin::which_initial_state_info(p.final);
  m["which_initial_state_info_unprojected"] = spin::which_initial_state_info(p.unprojected);
  m["surviving_norm"] = p.projected.total().squaredNorm();
  m["D_clicks"] = distinguishability(clicks);
  return rep;
}

RunReport run_theorem(const ScenarioConfig& cfg) {
  const auto t = theorem::check_theorem<double>(cfg.theorem_trials, cfg.theorem_dim, cfg.seed);
  RunReport rep;
  rep.config = cfg;
  json& m = rep.metrics;
  m["trials"] = t.trials;
  m["dim"] = t.dim;
  m["min_overlap"] = t.min_overlap;
  m["max_overlap"] = t.max_overlap;
  m["worst_deviation"] = t.worst_deviation;
  m["worst_invariant_residual"] = t.worst_invariant_residual;
  m["violations"] = t.violations;
  m["passed"] = t.passed;
  return rep;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw pipeline_error(kModule, "cannot write " + tmp.string());
    out << content;
    if (!out) throw pipeline_error(kModule, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void dump_value(const json& v, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) { out += "{}"; return; }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_value(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) { out += "[]"; return; }
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += indent < 0 ? "," : ", ";
        dump_value(v[i], -1, depth + 1, out);
      }
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) { out += "null"; return; }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

double RunReport::metric(const std::string& name) const {
  if (!metrics.contains(name) || !metrics[name].is_number()) {
    throw pipeline_error(kModule, "metric '" + name + "' is not available");
  }
  return metrics[name].get<double>();
}

FringeMap measure_fringes(const ScenarioConfig& cfg) {
  cfg.validate();
  const Interval window = cfg.fringe_window.value_or(default_fringe_window(cfg));
  if (cfg.kind == ScenarioKind::wheeler) {
    BranchedField start;
    start.a = gaussian_packet(cfg.grid, cfg.wheeler.offset, cfg.wheeler.epsilon, -cfg.wheeler.momentum, cfg.slit.amp_a);
    start.b = gaussian_packet(cfg.grid, -cfg.wheeler.offset, cfg.wheeler.epsilon, cfg.wheeler.momentum, cfg.slit.amp_b);
    const double tc = cfg.wheeler.crossing_time(cfg.slit.mass, cfg.slit.hbar);
    return find_dark_fringes(propagate_spectral(start, tc, cfg.slit.mass, cfg.slit.hbar), window);
  }
  if (cfg.kind != ScenarioKind::afshar) {
    throw validation_error(kModule, "fringe maps are defined for afshar and wheeler configs");
  }
  return find_dark_fringes(propagate_analytic(initial_state(cfg.slit, cfg.grid), cfg.time), window);
}

RunReport run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  switch (cfg.kind) {
    case ScenarioKind::afshar: rep = run_afshar(cfg); break;
    case ScenarioKind::single_slit: rep = run_single_slit(cfg); break;
    case ScenarioKind::wheeler: rep = run_wheeler(cfg); break;
    case ScenarioKind::spin_toy: rep = run_spin_toy(cfg); break;
    case ScenarioKind::theorem_check: rep = run_theorem(cfg); break;
  }
  rep.provenance.version = WHICHWAY_VERSION;
  rep.provenance.parameter_hash = config_hash(cfg);
  if (rep.fringes && rep.provenance.fringe_map_hash.empty()) {
    rep.provenance.fringe_map_hash = fringe_hash(*rep.fringes);
    rep.provenance.fringe_source_hash = rep.provenance.parameter_hash;
  }
  rep.provenance.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string stable_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ScenarioConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output_dir");
  return stable_hash(dump_json(j, -1));
}

std::string fringe_hash(const FringeMap& map) { return stable_hash(dump_json(to_json(map), -1)); }

json to_json(const FringeMap& map) {
  return {{"minima_positions", map.minima_positions},
          {"minima_intensities", map.minima_intensities},
          {"fringe_spacing", map.fringe_spacing}};
}

json to_json(const DetectorReport& r) {
  const FluxLedger& l = r.ledger;
  return {{"p_da_total", r.p_da_total},
          {"p_db_total", r.p_db_total},
          {"p_da_from_a", r.p_da_from_a},
          {"p_db_from_a", r.p_db_from_a},
          {"p_da_from_b", r.p_da_from_b},
          {"p_db_from_b", r.p_db_from_b},
          {"blocked_flux", r.blocked_flux},
          {"leaked_flux", r.leaked_flux},
          {"ledger",
           {{"norm_in_a", l.norm_in_a},
            {"norm_in_b", l.norm_in_b},
            {"norm_in_total", l.norm_in_total},
            {"blocked_a", l.blocked_a},
            {"blocked_b", l.blocked_b},
            {"leaked_a", l.leaked_a},
            {"leaked_b", l.leaked_b}}}};
}

json to_json(const RunReport& rep) {
  json j;
  j["config"] = to_json(rep.config);
  j["fringe_map"] = rep.fringes ? to_json(*rep.fringes) : json(nullptr);
  j["wires"] = rep.wires ? wires_json(*rep.wires) : json(nullptr);
  json det = rep.detector ? to_json(*rep.detector) : json(nullptr);
  if (rep.detector) det["metrics"] = rep.metrics;
  j["detector_report"] = det;
  j["detector_report_no_wires"] = rep.detector_no_wires ? to_json(*rep.detector_no_wires) : json(nullptr);
  j["mode_contributions"] = rep.modes ? mode_json(*rep.modes) : json(nullptr);
  j["metrics"] = rep.metrics;
  j["details"] = rep.details;
  j["provenance"] = {{"version", rep.provenance.version},
                     {"parameter_hash", rep.provenance.parameter_hash},
                     {"fringe_map_hash", rep.provenance.fringe_map_hash},
                     {"fringe_source_hash", rep.provenance.fringe_source_hash},
                     {"wall_time_seconds", rep.provenance.wall_time_seconds}};
  return j;
}

std::string dump_json(const json& value, int indent) {
  std::string out;
  dump_value(value, indent, 0, out);
  return out;
}

std::filesystem::path resolve_output_dir(const std::string& output_dir) {
  std::filesystem::path dir = output_dir.empty() ? std::filesystem::path("whichway_run") : std::filesystem::path(output_dir);
  if (const char* root = std::getenv("WHICHWAY_OUTPUT_ROOT"); root && *root && dir.is_relative()) {
    dir = std::filesystem::path(root) / dir;
  }
  return dir;
}

void write_run_outputs(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_atomically(dir / "report.json", dump_json(to_json(report)) + "\n");
  const std::size_t stride = report.config.csv_stride;
  if (report.pre_lens) {
    std::ostringstream csv;
    write_intensity_csv(csv, *report.pre_lens, stride);
    write_atomically(dir / "intensity_pre_lens.csv", csv.str());
  }
  if (report.image_plane) {
    std::ostringstream csv;
    write_intensity_csv(csv, *report.image_plane, stride);
    write_atomically(dir / "intensity_image_plane.csv", csv.str());
  }
}

SweepParameter sweep_parameter_from_string(const std::string& name) {
  for (SweepParameter p : {SweepParameter::wire_width_fraction, SweepParameter::wire_count,
                           SweepParameter::time, SweepParameter::amplitude_ratio,
                           SweepParameter::lens_aperture}) {
    if (to_string(p) == name) return p;
  }
  throw validation_error(kModule, "unknown sweep parameter '" + name + "'");
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::wire_width_fraction: return "wire_width_fraction";
    case SweepParameter::wire_count: return "wire_count";
    case SweepParameter::time: return "time";
    case SweepParameter::amplitude_ratio: return "amplitude_ratio";
    case SweepParameter::lens_aperture: return "lens_aperture";
  }
  return "unknown";
}

ScenarioConfig with_parameter(const ScenarioConfig& cfg, SweepParameter p, double value) {
  ScenarioConfig out = cfg;
  switch (p) {
    case SweepParameter::wire_width_fraction:
      out.wires.mode = WireSpec::Mode::automatic;
      out.wires.automatic.width_fraction = value;
      break;
    case SweepParameter::wire_count:
      if (!(value >= 1.0) || value != std::floor(value)) {
        throw validation_error(kModule, "wire count must be a positive integer");
      }
      out.wires.mode = WireSpec::Mode::automatic;
      out.wires.automatic.count = static_cast<std::size_t>(value);
      break;
    case SweepParameter::time:
      out.time = value;
      out.lens = LensSpec{value / 2.0, cfg.lens.aperture_halfwidth, value, value, cfg.lens.edge_softness};
      break;
    case SweepParameter::amplitude_ratio:
      if (!(value >= 0.0 && value <= 1.0)) throw validation_error(kModule, "amplitude ratio must lie in [0, 1]");
      out.slit.amp_a = std::sqrt(value);
      out.slit.amp_b = std::sqrt(1.0 - value);
      break;
    case SweepParameter::lens_aperture:
      out.lens.aperture_halfwidth = value;
      break;
  }
  return out;
}

std::vector<SweepEntry> sweep(const ScenarioConfig& cfg, SweepParameter p,
                              const std::vector<double>& values) {
  std::vector<SweepEntry> entries;
  entries.reserve(values.size());
  for (double v : values) {
    SweepEntry e;
    e.value = v;
    try {
      e.report = run_scenario(with_parameter(cfg, p, v));
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string sweep_csv(const std::vector<SweepEntry>& entries) {
  std::string out = "value,status,blocked_flux,D,V,I,D_mode,I_mode,error\n";
  auto cell = [](const RunReport& r, const char* name) -> std::string {
    if (!r.metrics.contains(name) || !r.metrics[name].is_number()) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", r.metrics[name].get<double>());
    return buf;
  };
  for (const SweepEntry& e : entries) {
    char value[40];
    std::snprintf(value, sizeof value, "%.17g", e.value);
    out += value;
    if (e.report) {
      const RunReport& r = *e.report;
      out += ",ok," + cell(r, "blocked_flux") + "," + cell(r, "D") + "," + cell(r, "visibility") +
             "," + cell(r, "I") + "," + cell(r, "D_mode") + "," + cell(r, "I_mode") + ",\n";
    } else {
      std::string msg = e.error;
      for (char& c : msg) {
        if (c == '"') c = '\'';
        if (c == '\n') c = ' ';
      }
      out += ",error,,,,,,,\"" + msg + "\"\n";
    }
  }
  return out;
}

}  // namespace whichway
