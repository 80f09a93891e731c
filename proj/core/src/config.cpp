#include "edlab/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "edlab/error.hpp"

namespace edlab {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw ConfigError("config: " + std::string(key) + " = '" + std::string(value) + "' is not " + expected);
}

double parse_real(std::string_view key, std::string_view value) {
  const std::string text(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    bad_value(key, value, "a number");
  }
  if (used != text.size()) bad_value(key, value, "a number");
  return out;
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value, "an integer");
  return out;
}

std::string parse_choice(std::string_view key, std::string_view value, std::initializer_list<const char*> choices) {
  for (const char* c : choices) {
    if (value == c) return std::string(value);
  }
  std::string expected = "one of";
  for (const char* c : choices) expected += std::string(" ") + c;
  throw ConfigError("config: " + std::string(key) + " = '" + std::string(value) + "' is not " + expected);
}

using Setter = std::function<void(ScenarioConfig&, std::string_view key, std::string_view value)>;

template <class Section>
void add_grid(std::vector<std::pair<std::string, Setter>>& table, const std::string& prefix, Section section) {
  table.emplace_back(prefix + ".n_points", [section](ScenarioConfig& c, auto k, auto v) {
    section(c).n_points = parse_integer<std::size_t>(k, v);
  });
  table.emplace_back(prefix + ".x_min", [section](ScenarioConfig& c, auto k, auto v) { section(c).x_min = parse_real(k, v); });
  table.emplace_back(prefix + ".x_max", [section](ScenarioConfig& c, auto k, auto v) { section(c).x_max = parse_real(k, v); });
}

template <class Section>
void add_search(std::vector<std::pair<std::string, Setter>>& table, const std::string& prefix, Section section) {
  auto real = [&](const char* name, double SearchConfig::*field) {
    table.emplace_back(prefix + "." + name, [section, field](ScenarioConfig& c, auto k, auto v) {
      section(c).*field = parse_real(k, v);
    });
  };
  auto count = [&](const char* name, std::size_t SearchConfig::*field) {
    table.emplace_back(prefix + "." + name, [section, field](ScenarioConfig& c, auto k, auto v) {
      section(c).*field = parse_integer<std::size_t>(k, v);
    });
  };
  real("x0_lo", &SearchConfig::x0_lo);
  real("x0_hi", &SearchConfig::x0_hi);
  real("p0_lo", &SearchConfig::p0_lo);
  real("p0_hi", &SearchConfig::p0_hi);
  table.emplace_back(prefix + ".sigma_lo", [section](ScenarioConfig& c, auto k, auto v) { section(c).sigma_lo = parse_real(k, v); });
  table.emplace_back(prefix + ".sigma_hi", [section](ScenarioConfig& c, auto k, auto v) { section(c).sigma_hi = parse_real(k, v); });
  count("count_x0", &SearchConfig::count_x0);
  count("count_p0", &SearchConfig::count_p0);
  count("count_sigma", &SearchConfig::count_sigma);
  real("refine_tol", &SearchConfig::refine_tol);
  count("max_refine_iters", &SearchConfig::max_refine_iters);
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const auto table = [] {
    std::vector<std::pair<std::string, Setter>> t;
    add_grid(t, "grid", [](ScenarioConfig& c) -> GridConfig& { return c.grid; });
    // Both grids share one hbar.
    t.emplace_back("grid.hbar", [](ScenarioConfig& c, auto k, auto v) {
      c.grid.hbar = parse_real(k, v);
      c.probe.grid.hbar = c.grid.hbar;
    });

    t.emplace_back("state.kind", [](ScenarioConfig& c, auto k, auto v) {
      c.state.kind = parse_choice(k, v, {"gaussian", "bump", "symmetric_pair", "random"});
    });
    auto state_real = [&](const char* name, double StateConfig::*field) {
      t.emplace_back(std::string("state.") + name, [field](ScenarioConfig& c, auto k, auto v) {
        c.state.*field = parse_real(k, v);
      });
    };
    state_real("x0", &StateConfig::x0);
    state_real("p0", &StateConfig::p0);
    state_real("sigma", &StateConfig::sigma);
    state_real("center", &StateConfig::center);
    state_real("halfwidth", &StateConfig::halfwidth);
    state_real("separation", &StateConfig::separation);
    t.emplace_back("state.seed", [](ScenarioConfig& c, auto k, auto v) { c.state.seed = parse_integer<std::uint64_t>(k, v); });
    t.emplace_back("state.smoothness", [](ScenarioConfig& c, auto k, auto v) { c.state.smoothness = parse_integer<int>(k, v); });

    t.emplace_back("channel.center", [](ScenarioConfig& c, auto k, auto v) { c.channel.center = parse_real(k, v); });
    t.emplace_back("channel.width", [](ScenarioConfig& c, auto k, auto v) { c.channel.width = parse_real(k, v); });
    t.emplace_back("channel.gain", [](ScenarioConfig& c, auto k, auto v) { c.channel.gain = parse_real(k, v); });

    add_grid(t, "probe", [](ScenarioConfig& c) -> GridConfig& { return c.probe.grid; });
    t.emplace_back("probe.s", [](ScenarioConfig& c, auto k, auto v) { c.probe.s = parse_real(k, v); });

    add_search(t, "search_error", [](ScenarioConfig& c) -> SearchConfig& { return c.search_error; });
    add_search(t, "search_disturbance", [](ScenarioConfig& c) -> SearchConfig& { return c.search_disturbance; });

    t.emplace_back("output.path", [](ScenarioConfig& c, auto, auto v) { c.output.path = std::string(v); });
    t.emplace_back("output.format", [](ScenarioConfig& c, auto k, auto v) {
      c.output.format = parse_choice(k, v, {"csv", "json"});
    });
    return t;
  }();
  return table;
}

}  // namespace

ScenarioName parse_scenario_name(std::string_view name) {
  if (name == "flip") return ScenarioName::flip;
  if (name == "slit") return ScenarioName::slit;
  if (name == "vonneumann") return ScenarioName::vonneumann;
  throw ConfigError("unknown scenario '" + std::string(name) + "' (expected flip, slit or vonneumann)");
}

const char* to_string(ScenarioName name) {
  switch (name) {
    case ScenarioName::flip: return "flip";
    case ScenarioName::slit: return "slit";
    case ScenarioName::vonneumann: return "vonneumann";
  }
  return "";
}

ScenarioConfig default_config(ScenarioName name) {
  ScenarioConfig c;
  c.scenario = name;
  if (name == ScenarioName::slit) {
    c.state.kind = "bump";
    c.state.center = 0.0;
    c.state.halfwidth = 1.0;
    c.channel.center = 0.0;
    c.channel.width = 4.0;
  }
  return c;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [key, setter] : setters()) out.push_back(key);
  return out;
}

void set_value(ScenarioConfig& config, std::string_view key, std::string_view value) {
  for (const auto& [name, setter] : setters()) {
    if (name == key) {
      setter(config, key, trim(value));
      return;
    }
  }
  throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

void apply_assignment(ScenarioConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("config: expected key=value, got '" + std::string(assignment) + "'");
  }
  set_value(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void apply_config(ScenarioConfig& config, std::istream& in) {
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
    }
    const std::string key(trim(view.substr(0, eq)));
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    set_value(config, key, trim(view.substr(eq + 1)));
  }
}

void apply_config_file(ScenarioConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  apply_config(config, in);
}

}  // namespace edlab
