// whichway: command-line driver for the scenario pipelines.
//
// Exit codes: 0 success, 2 invalid input, 3 pipeline failure.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "whichway/error.hpp"
#include "whichway/orthogonality_theorem.hpp"
#include "whichway/scenarios.hpp"

namespace {

using namespace whichway;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitPipeline = 3;

std::filesystem::path output_dir_for(const ScenarioConfig& cfg, const std::string& override_dir,
                                     const std::string& fallback) {
  if (!override_dir.empty()) return resolve_output_dir(override_dir);
  return resolve_output_dir(cfg.output_dir.empty() ? "runs/" + fallback : cfg.output_dir);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!(out << text)) throw pipeline_error("scenarios_cli", "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw validation_error("scenarios_cli", "cannot parse sweep value '" + item + "'");
    }
  }
  return values;
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  const ScenarioConfig cfg = load_config(config_path);
  const RunReport report = run_scenario(cfg);
  const auto dir = output_dir_for(cfg, out_override, to_string(cfg.kind));
  write_run_outputs(report, dir);
  json summary = {{"output_dir", dir.string()}, {"metrics", report.metrics}, {"provenance", to_json(report)["provenance"]}};
  std::cout << dump_json(summary) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param, const std::string& list,
              const std::string& out_override) {
  const ScenarioConfig cfg = load_config(config_path);
  const SweepParameter p = sweep_parameter_from_string(param);
  const std::vector<double> values = parse_values(list);
  if (values.empty()) throw validation_error("scenarios_cli", "sweep needs at least one value");
  // Reject values that cannot form a valid config before running anything.
  for (double v : values) with_parameter(cfg, p, v).validate();

  const auto entries = sweep(cfg, p, values);
  const std::string csv = sweep_csv(entries);
  const auto dir = output_dir_for(cfg, out_override, "sweep_" + param);
  write_text(dir / "sweep.csv", csv);
  std::cout << csv;
  for (const auto& e : entries) {
    if (!e.report) return kExitPipeline;
  }
  return 0;
}

int cmd_check_theorem(int trials, int dim, std::uint64_t seed) {
  const auto r = theorem::check_theorem<double>(trials, dim, seed);
  json j = {{"trials", r.trials},
            {"dim", r.dim},
            {"seed", r.seed},
            {"min_overlap", r.min_overlap},
            {"max_overlap", r.max_overlap},
            {"worst_deviation", r.worst_deviation},
            {"worst_invariant_residual", r.worst_invariant_residual},
            {"violations", r.violations},
            {"passed", r.passed}};
  std::cout << dump_json(j) << "\n";
  return r.passed ? 0 : kExitPipeline;
}

int cmd_fringe_map(const std::string& config_path, const std::string& out_override) {
  const ScenarioConfig cfg = load_config(config_path);
  const FringeMap map = measure_fringes(cfg);
  json j = to_json(map);
  j["fringe_map_hash"] = fringe_hash(map);
  j["parameter_hash"] = config_hash(cfg);
  const std::string text = dump_json(j) + "\n";
  write_text(output_dir_for(cfg, out_override, "fringe_map") / "fringe_map.json", text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Which-way interferometry simulations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", WHICHWAY_VERSION);

  std::string config_path, out_dir, param, values;
  int trials = 1000, dim = 3;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("config", config_path, "Scenario JSON")->required();
  run->add_option("--output-dir", out_dir, "Override the config's output_dir");

  auto* sw = app.add_subcommand("sweep", "Run a scenario over a list of parameter values");
  sw->add_option("config", config_path, "Scenario JSON")->required();
  sw->add_option("--param", param,
                 "wire_width_fraction | wire_count | time | amplitude_ratio | lens_aperture")
      ->required();
  sw->add_option("--values", values, "Comma-separated values")->required();
  sw->add_option("--output-dir", out_dir, "Override the config's output_dir");

  auto* th = app.add_subcommand("check-theorem", "Random-instance check of the overlap theorem");
  th->add_option("--trials", trials)->capture_default_str();
  th->add_option("--dim", dim)->capture_default_str();
  th->add_option("--seed", seed)->capture_default_str();

  auto* fm = app.add_subcommand("fringe-map", "Dark-fringe positions for a two-slit config");
  fm->add_option("config", config_path, "Scenario JSON")->required();
  fm->add_option("--output-dir", out_dir, "Override the config's output_dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir);
    if (*sw) return cmd_sweep(config_path, param, values, out_dir);
    if (*th) return cmd_check_theorem(trials, dim, seed);
    if (*fm) return cmd_fringe_map(config_path, out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::validation ? kExitValidation : kExitPipeline;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitValidation;
}
