#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "whichway/error.hpp"
#include "whichway/scenarios.hpp"

using namespace whichway;
using nlohmann::json;

namespace {

json numerics(const RunReport& r) {
  json j = to_json(r);
  j["provenance"].erase("wall_time_seconds");
  return j;
}

ScenarioConfig config(const std::string& text) { return parse_config_text(text); }

}  // namespace

TEST_CASE("config parsing and defaults") {
  const ScenarioConfig a = config(R"({"kind": "afshar"})");
  CHECK(a.time == 100.0);
  CHECK(a.wires.mode == WireSpec::Mode::automatic);
  CHECK(a.wires.automatic.count == 10);
  CHECK(a.wires.automatic.width_fraction == 0.05);
  CHECK(a.lens.image_distance == 100.0);
  CHECK(a.split_point == 0.0);

  const ScenarioConfig s = config(R"({"kind": "single_slit", "open_slit": "b"})");
  CHECK(s.open_slit == 'b');
  const ScenarioConfig w = config(R"({"kind": "wheeler"})");
  CHECK(w.grid.n_points == 16384);
  CHECK(w.wheeler.crossing_time(1.0, 1.0) == 10.0);

  const ScenarioConfig t = config(R"({"kind": "afshar", "time": 60})");
  CHECK(t.lens.object_distance == 60.0);
  CHECK(t.lens.magnification() == doctest::Approx(-1.0));

  const ScenarioConfig c = config(R"({"kind": "afshar", "slit": {"amp_a": [0.6, 0], "amp_b": [0, 0.8]}})");
  CHECK(c.slit.amp_b == Complex(0.0, 0.8));

  const ScenarioConfig l = config(R"({"kind": "afshar", "lens": {"focal_length": 40}})");
  CHECK(l.lens.object_distance == 100.0);
  CHECK(l.lens.image_distance == doctest::Approx(200.0 / 3.0));
}

TEST_CASE("config validation") {
  const char* bad[] = {
      R"([1, 2])",
      R"({"time": 100})",
      R"({"kind": "laser"})",
      R"({"kind": "afshar", "time": "soon"})",
      R"({"kind": "afshar", "time": -5})",
      R"({"kind": "afshar", "slit": {"amp_a": 1, "amp_b": 0}})",
      R"({"kind": "afshar", "slit": {"amp_a": 0.9, "amp_b": 0.9}})",
      R"({"kind": "afshar", "slit": {"epsilon": 6}})",
      R"({"kind": "afshar", "grid": {"n_points": 1000}})",
      R"({"kind": "afshar", "wires": {"count": 10, "width_fraction": 0.7}})",
      R"({"kind": "afshar", "wires": 3})",
      R"({"kind": "afshar", "lens": {"focal_length": 50, "image_distance": 90}})",
      R"({"kind": "afshar", "fringe_window": [5, -5]})",
      R"({"kind": "single_slit", "open_slit": "c"})",
      R"({"kind": "wheeler", "wheeler": {"momentum": 0}})",
      R"({"kind": "spin_toy", "spin": {"field_strength": 0}})",
      R"({"kind": "theorem_check", "theorem": {"dim": 2}})",
      R"({"kind": "afshar", "csv_stride": 0})",
      R"(not json)",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    try {
      parse_config_text(text);
      FAIL("accepted invalid config");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::validation);
    }
  }
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("config round trip is idempotent") {
  for (const char* text :
       {R"({"kind": "afshar", "wires": {"count": 6, "width_fraction": 0.1}, "fringe_window": [-200, 200]})",
        R"({"kind": "single_slit", "open_slit": "b", "lens": {"focal_length": 40}})",
        R"({"kind": "wheeler", "wires": "none"})",
        R"({"kind": "afshar", "wires": {"positions": [-1, 1], "width": 0.5}})",
        R"({"kind": "spin_toy", "spin": {"field_strength": 2.5}})",
        R"({"kind": "theorem_check", "theorem": {"trials": 10, "dim": 4}, "seed": 9})"}) {
    const json once = to_json(parse_config_text(text));
    const json twice = to_json(parse_config_text(dump_json(once)));
    CHECK(dump_json(once) == dump_json(twice));
    CHECK(config_hash(parse_config_text(text)) == config_hash(parse_config_text(dump_json(once))));
  }
}

TEST_CASE("floats are written with 17 significant digits") {
  CHECK(dump_json(json(0.1), -1) == "0.10000000000000001");
  CHECK(dump_json(json::array({1.0 / 3.0, 2}), -1) == "[0.33333333333333331,2]");
  CHECK(dump_json(json(std::nan("")), -1) == "null");
  CHECK(stable_hash("") == "cbf29ce484222325");
}

TEST_CASE("afshar run") {
  const RunReport r = run_scenario(default_config(ScenarioKind::afshar));
  CHECK(r.metric("blocked_flux") < 0.005);
  CHECK(r.metric("total_change_da") < 0.01);
  CHECK(r.metric("total_change_db") < 0.01);
  CHECK(r.metric("visibility") > 0.99);
  CHECK(r.metric("D_mode") < 1e-9);
  CHECK(r.metric("duality_budget") <= 1.0 + 1e-9);
  CHECK(r.metric("D_no_wires") > 0.99);
  REQUIRE(r.wires);
  CHECK(r.wires->positions.size() == 10);
  REQUIRE(r.detector);
  const json j = to_json(r);
  CHECK(j["detector_report"]["metrics"]["D"] == j["metrics"]["D"]);
  CHECK(j["provenance"]["parameter_hash"] == config_hash(r.config));
  CHECK_THROWS_AS(r.metric("no_such_metric"), Error);
}

TEST_CASE("determinism") {
  for (ScenarioKind k : {ScenarioKind::afshar, ScenarioKind::wheeler, ScenarioKind::spin_toy,
                         ScenarioKind::theorem_check}) {
    ScenarioConfig cfg = default_config(k);
    cfg.theorem_trials = 50;
    CHECK(dump_json(numerics(run_scenario(cfg))) == dump_json(numerics(run_scenario(cfg))));
  }
}

TEST_CASE("single slit reuses the symmetric fringe map") {
  const ScenarioConfig sym = default_config(ScenarioKind::afshar);
  const RunReport both = run_scenario(sym);
  const RunReport one = run_scenario(default_config(ScenarioKind::single_slit));
  CHECK(one.provenance.fringe_map_hash == both.provenance.fringe_map_hash);
  CHECK(one.provenance.fringe_source_hash == config_hash(sym));
  REQUIRE(one.wires);
  CHECK(one.wires->positions == both.wires->positions);
  CHECK(one.metric("blocked_flux") >= 10.0 * both.metric("blocked_flux"));
  CHECK(one.metric("imaging_fidelity_no_wires") >= 0.99);
  CHECK(one.metrics["visibility"].is_null());

  ScenarioConfig b = default_config(ScenarioKind::single_slit);
  b.open_slit = 'b';
  const RunReport other = run_scenario(b);
  CHECK(other.metric("imaging_fidelity_no_wires") >= 0.99);
  CHECK(other.metric("blocked_flux") == doctest::Approx(one.metric("blocked_flux")).epsilon(1e-9));
}

TEST_CASE("wheeler crossing") {
  const RunReport r = run_scenario(default_config(ScenarioKind::wheeler));
  CHECK(std::abs(r.metric("D_no_wires") - 1.0) < 1e-6);
  CHECK(r.metric("D") < r.metric("D_no_wires"));
  CHECK(r.metric("blocked_flux") > 0.0);
  ScenarioConfig none = default_config(ScenarioKind::wheeler);
  none.wires.mode = WireSpec::Mode::none;
  const RunReport clear = run_scenario(none);
  CHECK(clear.metric("D") == r.metric("D_no_wires"));
  CHECK(clear.metric("blocked_flux") == 0.0);
}

TEST_CASE("spin and theorem scenarios") {
  const RunReport s = run_scenario(default_config(ScenarioKind::spin_toy));
  CHECK(s.metric("which_initial_state_info") < 1e-12);
  CHECK(std::abs(s.metric("which_initial_state_info_unprojected") - 1.0) < 1e-12);
  ScenarioConfig t = default_config(ScenarioKind::theorem_check);
  t.theorem_trials = 100;
  t.theorem_dim = 8;
  const RunReport th = run_scenario(t);
  CHECK(th.metrics["passed"] == true);
  CHECK(th.metric("violations") == 0.0);
}

TEST_CASE("sweeps") {
  const ScenarioConfig cfg = default_config(ScenarioKind::afshar);
  CHECK(sweep(cfg, SweepParameter::wire_width_fraction, {}).empty());
  CHECK(sweep_csv({}) == "value,status,blocked_flux,D,V,I,D_mode,I_mode,error\n");

  const auto widths = sweep(cfg, SweepParameter::wire_width_fraction, {0.01, 0.05, 0.1, 0.15, 0.2});
  double previous = 0.0;
  for (const auto& e : widths) {
    REQUIRE(e.report);
    CHECK(e.report->metric("blocked_flux") > previous);
    previous = e.report->metric("blocked_flux");
  }

  const auto ratios = sweep(cfg, SweepParameter::amplitude_ratio, {0.5, 0.7, 0.95});
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    CHECK(ratios[i].report->metric("visibility") < ratios[i - 1].report->metric("visibility"));
    CHECK(ratios[i].report->metric("D_mode") > ratios[i - 1].report->metric("D_mode"));
    const double w = ratios[i].value;
    CHECK(std::abs(ratios[i].report->metric("visibility") - 2 * std::sqrt(w * (1 - w))) < 0.02);
  }

  const auto mixed = sweep(cfg, SweepParameter::wire_width_fraction, {0.05, 0.7});
  CHECK(mixed[0].report);
  CHECK_FALSE(mixed[1].report);
  CHECK_FALSE(mixed[1].error.empty());
  const std::string csv = sweep_csv(mixed);
  CHECK(csv.find(",ok,") != std::string::npos);
  CHECK(csv.find(",error,") != std::string::npos);

  const auto fwd = sweep(cfg, SweepParameter::wire_count, {4, 8});
  const auto rev = sweep(cfg, SweepParameter::wire_count, {8, 4});
  CHECK(dump_json(numerics(*fwd[0].report)) == dump_json(numerics(*rev[1].report)));
  CHECK_THROWS_AS(with_parameter(cfg, SweepParameter::wire_count, 2.5), Error);
  CHECK_THROWS_AS(sweep_parameter_from_string("colour"), Error);
  CHECK(sweep_parameter_from_string("lens_aperture") == SweepParameter::lens_aperture);

  const ScenarioConfig later = with_parameter(cfg, SweepParameter::time, 60.0);
  CHECK(later.lens.object_distance == 60.0);
  CHECK_NOTHROW(later.validate());
}

TEST_CASE("run outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "whichway_test_outputs";
  std::filesystem::remove_all(dir);
  const RunReport r = run_scenario(default_config(ScenarioKind::afshar));
  write_run_outputs(r, dir);
  for (const char* f : {"report.json", "intensity_pre_lens.csv", "intensity_image_plane.csv"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream in(dir / "report.json");
  const json back = json::parse(in);
  CHECK(back["metrics"]["blocked_flux"].get<double>() == r.metric("blocked_flux"));
  CHECK(back["fringe_map"]["minima_positions"].size() == 10);
  std::filesystem::remove_all(dir);

  ::setenv("WHICHWAY_OUTPUT_ROOT", "/tmp/root", 1);
  CHECK(resolve_output_dir("runs/x") == std::filesystem::path("/tmp/root/runs/x"));
  CHECK(resolve_output_dir("/abs/x") == std::filesystem::path("/abs/x"));
  ::unsetenv("WHICHWAY_OUTPUT_ROOT");
  CHECK(resolve_output_dir("runs/x") == std::filesystem::path("runs/x"));
}
