// edlab: run the error-disturbance scenarios, sweeps and the maximized check.
//
// Exit codes: 0 success, 1 configuration or precondition error, 2 physics
// invariant violation (including confinement).

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "edlab/config.hpp"
#include "edlab/error.hpp"
#include "edlab/scenario.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else if (c != ' ') {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

edlab::ScenarioConfig load(const std::string& name, const std::string& config_path,
                           const std::vector<std::string>& assignments) {
  auto config = edlab::default_config(edlab::parse_scenario_name(name));
  if (!config_path.empty()) edlab::apply_config_file(config, config_path);
  for (const auto& a : assignments) edlab::apply_assignment(config, a);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-disturbance relations on a discretized line"};
  app.require_subcommand(1);

  std::string scenario_name;
  std::string config_path;
  std::vector<std::string> assignments;
  std::string out_path;
  std::string format;
  auto* scenario = app.add_subcommand("scenario", "Run one scenario and report every per-state quantity");
  scenario->add_option("name", scenario_name, "flip | slit | vonneumann")->required();
  scenario->add_option("--config", config_path, "key=value configuration file");
  scenario->add_option("--set", assignments, "Override one key (repeatable)");
  scenario->add_option("--out", out_path, "Report file");
  scenario->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  std::string axis;
  std::string values;
  std::string sweep_scenario = "vonneumann";
  std::string sweep_config;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "One report row per value of a configuration key");
  sweep->add_option("--axis", axis, "Configuration key to sweep")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--scenario", sweep_scenario, "flip | slit | vonneumann");
  sweep->add_option("--config", sweep_config, "key=value configuration file");
  sweep->add_option("--out", sweep_out, "CSV file")->required();

  std::string eq2_config;
  std::string out_dir;
  auto* eq2 = app.add_subcommand("eq2", "Maximize error and disturbance over the Gaussian family");
  eq2->add_option("--config", eq2_config, "key=value configuration file");
  eq2->add_option("--out-dir", out_dir, "Directory for landscapes and summary")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*scenario) {
      auto config = load(scenario_name, config_path, assignments);
      if (!out_path.empty()) config.output.path = out_path;
      if (!format.empty()) config.output.format = format;
      const auto report = edlab::run_scenario(config);
      edlab::write_table(std::cout, report);
      if (!config.output.path.empty()) edlab::write_report(report, config.output.path, config.output.format);
    } else if (*sweep) {
      const auto config = load(sweep_scenario, sweep_config, {});
      const auto rows = edlab::run_sweep(config, axis, split_values(values));
      edlab::write_sweep(sweep_out, axis, rows);
      std::cout << "wrote " << rows.size() << " rows to " << sweep_out << '\n';
    } else if (*eq2) {
      const auto config = load("vonneumann", eq2_config, {});
      const auto run = edlab::run_eq2(config);
      edlab::write_eq2_summary(std::cout, run);
      edlab::write_eq2(run, out_dir);
    }
  } catch (const edlab::InvariantError& e) {
    std::cerr << "edlab: invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const edlab::Error& e) {
    std::cerr << "edlab: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "edlab: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
