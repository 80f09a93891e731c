#include "edlab/supsearch.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "edlab/edrmetrics.hpp"
#include "edlab/error.hpp"
#include "edlab/format.hpp"
#include "edlab/statelib.hpp"

namespace edlab {
namespace {

constexpr std::size_t kMaxGoldenSteps = 60;
constexpr double kConfinedFraction = 1.0 / 8.0;

// Search coordinates: x0 and p0 as is, sigma as log(sigma).
using Coords = std::array<double, 3>;

FamilyPoint to_point(const Coords& u) { return {u[0], u[1], std::exp(u[2])}; }

std::array<Range, 3> coordinate_ranges(const SearchSpec& spec) {
  return {spec.x0, spec.p0, Range{std::log(spec.sigma.lo), std::log(spec.sigma.hi)}};
}

std::vector<double> axis_values(const Range& r, std::size_t count) {
  if (count == 1) return {0.5 * (r.lo + r.hi)};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = i + 1 == count ? r.hi : r.lo + t * (r.hi - r.lo);
  }
  return out;
}

class Search {
 public:
  Search(const StateMetric& metric, const GridSpec& grid) : metric_(metric), grid_(grid) {}

  // Evaluates one family member; inadmissible members score -inf and are traced as NaN.
  double evaluate(const Coords& u) {
    const FamilyPoint p = to_point(u);
    double value = -std::numeric_limits<double>::infinity();
    bool admissible = true;
    try {
      value = metric_(make_state(grid_, GaussianSpec{p.x0, p.p0, p.sigma}));
    } catch (const PreconditionError&) {
      admissible = false;
    } catch (const ConfinementError&) {
      admissible = false;
    }
    if (admissible && !std::isfinite(value)) {
      throw InvariantError("supsearch: metric returned a non-finite value");
    }
    trace_.push_back({p, admissible ? value : std::numeric_limits<double>::quiet_NaN(), admissible});
    if (admissible && (!found_ || value > best_value_)) {
      found_ = true;
      best_value_ = value;
      best_ = u;
    }
    return value;
  }

  // Golden-section maximization along one coordinate; the incumbent only moves on strict improvement.
  void line_search(std::size_t axis, double lo, double hi, double tol) {
    constexpr double phi = 0.6180339887498949;
    Coords base = best_;
    auto at = [&](double t) {
      Coords u = base;
      u[axis] = t;
      return evaluate(u);
    };
    double a = lo;
    double b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = at(c);
    double fd = at(d);
    for (std::size_t step = 0; step < kMaxGoldenSteps && b - a > tol; ++step) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = at(d);
      }
    }
  }

  void set_best(const Coords& u, double value) {
    found_ = true;
    best_ = u;
    best_value_ = value;
  }

  [[nodiscard]] bool found() const { return found_; }
  [[nodiscard]] double best_value() const { return best_value_; }
  [[nodiscard]] const Coords& best() const { return best_; }
  std::vector<TraceEntry>& trace() { return trace_; }

 private:
  const StateMetric& metric_;
  const GridSpec& grid_;
  std::vector<TraceEntry> trace_;
  bool found_ = false;
  double best_value_ = 0.0;
  Coords best_{};
};

}  // namespace

SearchSpec default_search_spec(const GridSpec& grid) {
  SearchSpec spec;
  spec.sigma = {kMinCellsPerSigma * grid.dx(), kConfinedFraction * grid.length()};
  return spec;
}

void validate(const SearchSpec& spec, const GridSpec& grid) {
  for (const Range& r : {spec.x0, spec.p0, spec.sigma}) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
      throw PreconditionError("search: every range needs finite lo <= hi");
    }
  }
  for (std::size_t c : spec.coarse_counts) {
    if (c == 0) throw PreconditionError("search: coarse counts must be >= 1");
  }
  if (!(spec.refine_tol > 0.0)) throw PreconditionError("search: refine_tol must be positive");
  const double slack = 1e-12;
  if (spec.sigma.lo < kMinCellsPerSigma * grid.dx() * (1.0 - slack)) {
    throw PreconditionError("search: sigma lower bound spans fewer than 8 grid cells");
  }
  if (spec.sigma.hi > kConfinedFraction * grid.length() * (1.0 + slack)) {
    throw PreconditionError("search: sigma upper bound exceeds one eighth of the domain");
  }
}

SupResult maximize(const StateMetric& metric, const GridSpec& grid, const SearchSpec& spec) {
  validate(spec, grid);
  const auto ranges = coordinate_ranges(spec);
  Search search(metric, grid);

  // Coarse scan in x0, p0, sigma order; ties keep the lexicographically smallest point.
  std::array<std::vector<double>, 3> values;
  for (std::size_t a = 0; a < 3; ++a) values[a] = axis_values(ranges[a], spec.coarse_counts[a]);
  bool have = false;
  double best_value = 0.0;
  Coords best{};
  FamilyPoint best_point{};
  for (double x0 : values[0]) {
    for (double p0 : values[1]) {
      for (double ls : values[2]) {
        const Coords u{x0, p0, ls};
        const double v = search.evaluate(u);
        if (!search.trace().back().admissible) continue;
        const FamilyPoint p = to_point(u);
        if (!have || v > best_value || (v == best_value && p < best_point)) {
          have = true;
          best_value = v;
          best = u;
          best_point = p;
        }
      }
    }
  }
  if (!have) throw PreconditionError("search: no admissible family member");
  search.set_best(best, best_value);

  for (std::size_t iter = 0; iter < spec.max_refine_iters; ++iter) {
    const double before = search.best_value();
    for (std::size_t a = 0; a < 3; ++a) {
      const std::size_t count = spec.coarse_counts[a];
      const double width = ranges[a].hi - ranges[a].lo;
      if (!(width > 0.0)) continue;
      const double step = count > 1 ? width / static_cast<double>(count - 1) : width;
      const double cur = search.best()[a];
      const double lo = std::max(ranges[a].lo, cur - step);
      const double hi = std::min(ranges[a].hi, cur + step);
      if (hi - lo <= spec.refine_tol) continue;
      search.line_search(a, lo, hi, spec.refine_tol);
    }
    if (search.best_value() - before < spec.refine_tol) break;
  }

  const Coords& u = search.best();
  return {search.best_value(), to_point(u), std::move(search.trace()), true};
}

Eq2Check eq2_check(const VonNeumannChannel& model, const GridSpec& grid, const SearchSpec& spec_error,
                   const SearchSpec& spec_disturbance) {
  const Channel channel = model;
  const StateMetric error = [&](const WaveFunction& psi) { return busch_state_error(model, psi); };
  const StateMetric disturbance = [&](const WaveFunction& psi) {
    return busch_state_disturbance(channel, psi, Basis::momentum);
  };
  Eq2Check out{maximize(error, grid, spec_error), maximize(disturbance, grid, spec_disturbance)};
  out.epsilon_B = out.error.value;
  out.eta_B = out.disturbance.value;
  out.product = out.epsilon_B * out.eta_B;
  out.hbar_over_2 = 0.5 * grid.hbar();
  out.slack = out.product - out.hbar_over_2;
  const FamilyPoint& a = out.error.argmax;
  const FamilyPoint& b = out.disturbance.argmax;
  const double tol = std::min(spec_error.refine_tol, spec_disturbance.refine_tol);
  out.argmax_differ = std::abs(a.x0 - b.x0) > tol || std::abs(a.p0 - b.p0) > tol ||
                      std::abs(a.sigma - b.sigma) > tol;
  auto product_at = [&](const FamilyPoint& p) {
    const auto psi = make_state(grid, GaussianSpec{p.x0, p.p0, p.sigma});
    return error(psi) * disturbance(psi);
  };
  out.product_at_error_argmax = product_at(a);
  out.product_at_disturbance_argmax = product_at(b);
  return out;
}

void write_trace_csv(std::ostream& out, const SupResult& result) {
  out << "x0,p0,sigma,value\n";
  for (const auto& e : result.trace) {
    out << format_real(e.params.x0) << ',' << format_real(e.params.p0) << ',' << format_real(e.params.sigma)
        << ',' << format_real(e.value) << '\n';
  }
}

}  // namespace edlab
