#pragma once

// End-to-end scenario runs, parameter sweeps and the maximized-quantity check.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "edlab/channels.hpp"
#include "edlab/config.hpp"
#include "edlab/edrmetrics.hpp"
#include "edlab/statelib.hpp"
#include "edlab/supsearch.hpp"

namespace edlab {

GridSpec build_grid(const GridConfig& config);
StateSpec build_state_spec(const StateConfig& config);
SearchSpec build_search_spec(const SearchConfig& config, const GridSpec& grid);
/// The probe is only built for the von Neumann scenario.
Channel build_channel(const ScenarioConfig& config, const GridSpec& system);
VonNeumannChannel build_von_neumann(const ScenarioConfig& config);

struct BuiltScenario {
  GridSpec grid;
  WaveFunction state;
  Channel channel;
};

/// Checks every module invariant the configuration touches.
BuiltScenario build(const ScenarioConfig& config);

EDRReport run_scenario(const ScenarioConfig& config);

/// Writes through a temporary file so a failed write leaves no partial output.
void write_report(const EDRReport& report, const std::filesystem::path& path, const std::string& format);

struct SweepRow {
  double value;
  std::string text;  ///< The value as given on the command line.
  EDRReport report;
};

/// One report per value, sorted by value. Every row is computed before anything is returned.
/// Throws ConfigError for an empty list or an unknown key.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::string& axis,
                                const std::vector<std::string>& values);
/// Swept key column followed by the EDRReport columns.
void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows);
void write_sweep(const std::filesystem::path& path, const std::string& axis, const std::vector<SweepRow>& rows);

struct Eq2Run {
  Eq2Check check;
  EDRReport at_error_argmax;
  EDRReport at_disturbance_argmax;
};

Eq2Run run_eq2(const ScenarioConfig& config);
void write_eq2_summary(std::ostream& out, const Eq2Run& run);
/// landscape_error.csv, landscape_disturbance.csv and eq2_summary.txt.
void write_eq2(const Eq2Run& run, const std::filesystem::path& out_dir);

}  // namespace edlab
