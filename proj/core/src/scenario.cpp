#include "edlab/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "edlab/error.hpp"
#include "edlab/format.hpp"

namespace edlab {
namespace {

void write_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  auto partial = path;
  partial += ".partial";
  try {
    {
      std::ofstream out(partial, std::ios::binary | std::ios::trunc);
      if (!out) throw ConfigError("cannot write '" + path.string() + "'");
      body(out);
      out.flush();
      if (!out) throw ConfigError("write failed for '" + path.string() + "'");
    }
    std::filesystem::rename(partial, path);
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(partial, ignored);
    throw;
  }
}

std::string describe_point(const FamilyPoint& p) {
  return "x0=" + format_real(p.x0) + " p0=" + format_real(p.p0) + " sigma=" + format_real(p.sigma);
}

}  // namespace

GridSpec build_grid(const GridConfig& c) { return make_grid(c.n_points, c.x_min, c.x_max, c.hbar); }

StateSpec build_state_spec(const StateConfig& c) {
  if (c.kind == "gaussian") return GaussianSpec{c.x0, c.p0, c.sigma};
  if (c.kind == "bump") return BumpSpec{c.center, c.halfwidth};
  if (c.kind == "symmetric_pair") return SymmetricPairSpec{c.separation, c.sigma};
  if (c.kind == "random") return RandomSpec{c.seed, c.smoothness};
  throw ConfigError("config: unknown state.kind '" + c.kind + "'");
}

SearchSpec build_search_spec(const SearchConfig& c, const GridSpec& grid) {
  SearchSpec spec = default_search_spec(grid);
  spec.x0 = {c.x0_lo, c.x0_hi};
  spec.p0 = {c.p0_lo, c.p0_hi};
  if (c.sigma_lo) spec.sigma.lo = *c.sigma_lo;
  if (c.sigma_hi) spec.sigma.hi = *c.sigma_hi;
  spec.coarse_counts = {c.count_x0, c.count_p0, c.count_sigma};
  spec.refine_tol = c.refine_tol;
  spec.max_refine_iters = c.max_refine_iters;
  validate(spec, grid);
  return spec;
}

VonNeumannChannel build_von_neumann(const ScenarioConfig& config) {
  auto probe = make_probe(build_grid(config.probe.grid), config.probe.s);
  return std::get<VonNeumannChannel>(make_von_neumann(config.channel.gain, std::move(probe)));
}

Channel build_channel(const ScenarioConfig& config, const GridSpec& system) {
  switch (config.scenario) {
    case ScenarioName::flip: return make_flip();
    case ScenarioName::slit: return make_slit(system, config.channel.center, config.channel.width);
    case ScenarioName::vonneumann: return build_von_neumann(config);
  }
  throw ConfigError("unknown scenario");
}

BuiltScenario build(const ScenarioConfig& config) {
  const GridSpec grid = build_grid(config.grid);
  auto state = make_state(grid, build_state_spec(config.state));
  auto channel = build_channel(config, grid);
  if (config.scenario == ScenarioName::flip && !grid.symmetric_about_origin()) {
    throw PreconditionError("flip: the domain must be symmetric about x = 0");
  }
  return {grid, std::move(state), std::move(channel)};
}

EDRReport run_scenario(const ScenarioConfig& config) {
  const auto built = build(config);
  return make_report(to_string(config.scenario), built.channel, built.state);
}

void write_report(const EDRReport& report, const std::filesystem::path& path, const std::string& format) {
  if (format != "csv" && format != "json") throw ConfigError("output format must be csv or json");
  write_atomically(path, [&](std::ostream& out) {
    if (format == "csv") {
      out << csv_header() << '\n' << csv_row(report) << '\n';
    } else {
      out << to_json(report) << '\n';
    }
  });
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::string& axis,
                                const std::vector<std::string>& values) {
  if (values.empty()) throw ConfigError("sweep: the value list is empty");
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (const auto& text : values) {
    ScenarioConfig config = base;
    set_value(config, axis, text);
    std::size_t used = 0;
    double numeric = 0.0;
    try {
      numeric = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw ConfigError("sweep: value '" + text + "' is not numeric");
    rows.push_back({numeric, text, run_scenario(config)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows) {
  out << axis << ',' << csv_header() << '\n';
  for (const auto& row : rows) out << format_real(row.value) << ',' << csv_row(row.report) << '\n';
}

void write_sweep(const std::filesystem::path& path, const std::string& axis, const std::vector<SweepRow>& rows) {
  write_atomically(path, [&](std::ostream& out) { write_sweep_csv(out, axis, rows); });
}

Eq2Run run_eq2(const ScenarioConfig& config) {
  if (config.scenario != ScenarioName::vonneumann) {
    throw ConfigError("eq2: requires the vonneumann scenario");
  }
  const GridSpec grid = build_grid(config.grid);
  const auto model = build_von_neumann(config);
  const auto spec_error = build_search_spec(config.search_error, grid);
  const auto spec_disturbance = build_search_spec(config.search_disturbance, grid);
  auto check = eq2_check(model, grid, spec_error, spec_disturbance);
  auto report_at = [&](const FamilyPoint& p) {
    const auto psi = make_state(grid, GaussianSpec{p.x0, p.p0, p.sigma});
    return make_report("vonneumann", Channel{model}, psi);
  };
  auto at_error = report_at(check.error.argmax);
  auto at_disturbance = report_at(check.disturbance.argmax);
  return {std::move(check), std::move(at_error), std::move(at_disturbance)};
}

void write_eq2_summary(std::ostream& out, const Eq2Run& run) {
  const Eq2Check& c = run.check;
  auto line = [&](const std::string& key, const std::string& value) {
    out << "  " << key;
    for (std::size_t pad = key.size(); pad < 34; ++pad) out << ' ';
    out << value << '\n';
  };
  out << "maximized quantities (Gaussian family; lower bounds on the suprema)\n";
  line("epsilon_B", format_real(c.epsilon_B));
  line("eta_B", format_real(c.eta_B));
  line("product epsilon_B * eta_B", format_real(c.product));
  line("hbar/2", format_real(c.hbar_over_2));
  line("slack", format_real(c.slack));
  line("argmax epsilon_B", describe_point(c.error.argmax));
  line("argmax eta_B", describe_point(c.disturbance.argmax));
  line("evaluations (error, disturbance)",
       std::to_string(c.error.trace.size()) + ", " + std::to_string(c.disturbance.trace.size()));
  if (c.argmax_differ) out << "argmax states differ\n";
  out << "per-state quantities at each argmax\n";
  out << "  quantity                          at argmax epsilon_B   at argmax eta_B\n";
  auto row = [&](const std::string& key, double a, double b) {
    std::string cell = format_real(a);
    out << "  " << key;
    for (std::size_t pad = key.size(); pad < 34; ++pad) out << ' ';
    out << cell;
    for (std::size_t pad = cell.size(); pad < 22; ++pad) out << ' ';
    out << format_real(b) << '\n';
  };
  const EDRReport& a = run.at_error_argmax;
  const EDRReport& b = run.at_disturbance_argmax;
  row("w2_error_X", a.w2_error_X, b.w2_error_X);
  row("w2_disturbance_P", a.w2_disturbance_P, b.w2_disturbance_P);
  row("w2 product on one state", c.product_at_error_argmax, c.product_at_disturbance_argmax);
  row("epsilon_o", a.epsilon_o, b.epsilon_o);
  row("eta_o_P", a.eta_o_P, b.eta_o_P);
  row("product_eq2_form", a.relations.eq2_form.value, b.relations.eq2_form.value);
  row("lhs_eq5", a.relations.eq5.value, b.relations.eq5.value);
}

void write_eq2(const Eq2Run& run, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create '" + out_dir.string() + "'");
  write_atomically(out_dir / "landscape_error.csv", [&](std::ostream& out) { write_trace_csv(out, run.check.error); });
  write_atomically(out_dir / "landscape_disturbance.csv",
                   [&](std::ostream& out) { write_trace_csv(out, run.check.disturbance); });
  write_atomically(out_dir / "eq2_summary.txt", [&](std::ostream& out) { write_eq2_summary(out, run); });
}

}  // namespace edlab
