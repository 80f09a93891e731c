#pragma once

// Flat key=value scenario configuration with dotted section paths.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edlab {

enum class ScenarioName { flip, slit, vonneumann };

/// Throws ConfigError for an unknown name.
ScenarioName parse_scenario_name(std::string_view name);
const char* to_string(ScenarioName name);

struct GridConfig {
  std::size_t n_points = 256;
  double x_min = -16.0;
  double x_max = 16.0;
  double hbar = 1.0;
};

struct StateConfig {
  std::string kind = "gaussian";  ///< gaussian | bump | symmetric_pair | random
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma = 1.0;
  double center = 0.0;
  double halfwidth = 1.0;
  double separation = 4.0;
  std::uint64_t seed = 1;
  int smoothness = 4;
};

struct ChannelConfig {
  double center = 0.0;  ///< Slit centre.
  double width = 4.0;   ///< Slit width.
  double gain = 1.0;    ///< Von Neumann coupling g.
};

struct ProbeConfig {
  GridConfig grid;
  double s = 0.5;
};

struct SearchConfig {
  double x0_lo = -1.0;
  double x0_hi = 1.0;
  double p0_lo = -1.0;
  double p0_hi = 1.0;
  std::optional<double> sigma_lo;  ///< Defaults to 8 dx.
  std::optional<double> sigma_hi;  ///< Defaults to length / 8.
  std::size_t count_x0 = 3;
  std::size_t count_p0 = 3;
  std::size_t count_sigma = 7;
  double refine_tol = 1e-3;
  std::size_t max_refine_iters = 10;
};

struct OutputConfig {
  std::string path;
  std::string format = "csv";  ///< csv | json
};

struct ScenarioConfig {
  ScenarioName scenario = ScenarioName::vonneumann;
  GridConfig grid;
  StateConfig state;
  ChannelConfig channel;
  ProbeConfig probe;
  SearchConfig search_error;
  SearchConfig search_disturbance;
  OutputConfig output;
};

/// Built-in defaults: flip on gaussian(0,0,1); slit of width 4 on bump(0,1);
/// von Neumann g=1, s=0.5 on gaussian(0,0,1). All on n=256, [-16,16].
ScenarioConfig default_config(ScenarioName name);

/// Every recognised key, in a fixed order.
std::vector<std::string> config_keys();

/// Throws ConfigError for unknown keys or unparsable values.
void set_value(ScenarioConfig& config, std::string_view key, std::string_view value);
/// "key=value".
void apply_assignment(ScenarioConfig& config, std::string_view assignment);
/// One assignment per line; blank lines and '#' comments ignored; a key may appear once.
void apply_config(ScenarioConfig& config, std::istream& in);
void apply_config_file(ScenarioConfig& config, const std::string& path);

}  // namespace edlab
