#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "edlab/edrmetrics.hpp"
#include "edlab/error.hpp"
#include "edlab/statelib.hpp"
#include "edlab/supsearch.hpp"

using namespace edlab;

namespace {

const GridSpec kGrid = make_grid(256, -16.0, 16.0);

VonNeumannChannel model(double s) {
  return std::get<VonNeumannChannel>(make_von_neumann(1.0, make_probe(kGrid, s)));
}

SearchSpec sigma_only(std::size_t count) {
  SearchSpec spec = default_search_spec(kGrid);
  spec.x0 = {0.0, 0.0};
  spec.p0 = {0.0, 0.0};
  // Above sigma ~ 2.4 a centred Gaussian leaves more than 1e-10 in the edge cells.
  spec.sigma = {1.0, 2.0};
  spec.coarse_counts = {1, 1, count};
  return spec;
}

}  // namespace

TEST_CASE("default search bounds span the resolvable and confined sigma range") {
  const auto spec = default_search_spec(kGrid);
  CHECK(spec.sigma.lo == doctest::Approx(1.0));
  CHECK(spec.sigma.hi == doctest::Approx(4.0));
  CHECK_NOTHROW(validate(spec, kGrid));
  auto bad = spec;
  bad.sigma.lo = 0.5;
  CHECK_THROWS_AS(validate(bad, kGrid), PreconditionError);
  bad = spec;
  bad.sigma.hi = 5.0;
  CHECK_THROWS_AS(validate(bad, kGrid), PreconditionError);
  bad = spec;
  bad.coarse_counts[1] = 0;
  CHECK_THROWS_AS(validate(bad, kGrid), PreconditionError);
  bad = spec;
  bad.x0 = {1.0, -1.0};
  CHECK_THROWS_AS(validate(bad, kGrid), PreconditionError);
}

TEST_CASE("constant metric") {
  const auto spec = default_search_spec(kGrid);
  const auto r = maximize([](const WaveFunction&) { return 0.0; }, kGrid, spec);
  CHECK(r.value == 0.0);
  CHECK(r.lower_bound_disclaimer);
  // Ties resolve to the lexicographically smallest coarse point.
  CHECK(r.argmax.x0 == doctest::Approx(-1.0));
  CHECK(r.argmax.p0 == doctest::Approx(-1.0));
  CHECK(r.argmax.sigma == doctest::Approx(1.0));
  // 63 coarse members, then one refinement sweep that finds nothing better.
  REQUIRE(r.trace.size() > 63);
  CHECK(r.trace[62].params == FamilyPoint{1.0, 1.0, 4.0});
}

TEST_CASE("smooth metric is refined to its interior maximum") {
  SearchSpec spec = default_search_spec(kGrid);
  spec.refine_tol = 1e-6;
  const auto r = maximize(
      [](const WaveFunction& psi) {
        const auto m = moments(psi);
        return -std::pow(m.mean_x - 0.37, 2) - std::pow(m.mean_p + 0.21, 2) - std::pow(m.delta_x - 2.3, 2);
      },
      kGrid, spec);
  CHECK(r.argmax.x0 == doctest::Approx(0.37).epsilon(1e-3));
  CHECK(r.argmax.p0 == doctest::Approx(-0.21).epsilon(1e-3));
  CHECK(r.argmax.sigma == doctest::Approx(2.3).epsilon(1e-3));
  CHECK(r.trace.size() > 63);
  for (const auto& e : r.trace) {
    if (e.admissible) CHECK(r.value >= e.value);
  }
}

TEST_CASE("pointer disturbance is maximized by the most momentum-localized state") {
  const auto m = model(0.5);
  const Channel c = m;
  const StateMetric metric = [&](const WaveFunction& psi) { return busch_state_disturbance(c, psi, Basis::momentum); };
  const auto r = maximize(metric, kGrid, sigma_only(7));
  CHECK(r.argmax.sigma == doctest::Approx(2.0).epsilon(1e-9));
  // Coarse trace increases with sigma.
  for (std::size_t i = 1; i < 7; ++i) CHECK(r.trace[i].value > r.trace[i - 1].value);
  const auto psi = make_state(kGrid, GaussianSpec{r.argmax.x0, r.argmax.p0, r.argmax.sigma});
  CHECK(metric(psi) == doctest::Approx(r.value).epsilon(1e-12));
}

TEST_CASE("pointer error is maximized by the most position-localized state") {
  const auto m = model(0.5);
  const StateMetric metric = [&](const WaveFunction& psi) { return busch_state_error(m, psi); };
  const auto r = maximize(metric, kGrid, sigma_only(7));
  CHECK(r.argmax.sigma == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 1; i < 7; ++i) CHECK(r.trace[i].value < r.trace[i - 1].value);
}

TEST_CASE("search is deterministic") {
  const auto m = model(0.5);
  const StateMetric metric = [&](const WaveFunction& psi) { return busch_state_error(m, psi); };
  auto spec = default_search_spec(kGrid);
  spec.coarse_counts = {2, 2, 3};
  const auto a = maximize(metric, kGrid, spec);
  const auto b = maximize(metric, kGrid, spec);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].params == b.trace[i].params);
    CHECK(std::memcmp(&a.trace[i].value, &b.trace[i].value, sizeof(double)) == 0);
  }
  CHECK(a.value == b.value);
}

TEST_CASE("inadmissible members are traced and skipped") {
  auto spec = default_search_spec(kGrid);
  spec.x0 = {-14.0, 0.0};
  spec.sigma = {1.0, 2.0};
  spec.coarse_counts = {2, 1, 2};
  spec.max_refine_iters = 0;
  const auto r = maximize([](const WaveFunction& psi) { return moments(psi).delta_x; }, kGrid, spec);
  CHECK(r.trace.size() == 4);
  CHECK_FALSE(r.trace[0].admissible);
  CHECK(std::isnan(r.trace[0].value));
  CHECK(r.trace[3].admissible);
  CHECK(r.argmax.x0 == 0.0);

  spec.x0 = {-14.0, -14.0};
  CHECK_THROWS_AS(maximize([](const WaveFunction&) { return 1.0; }, kGrid, spec), PreconditionError);
}

TEST_CASE("maximized error and disturbance come from different states") {
  auto spec = default_search_spec(kGrid);
  spec.coarse_counts = {1, 1, 5};
  const auto check = eq2_check(model(0.5), kGrid, spec, spec);
  CHECK(check.argmax_differ);
  CHECK(check.error.argmax.sigma < check.disturbance.argmax.sigma);
  CHECK(check.product == doctest::Approx(check.epsilon_B * check.eta_B));
  CHECK(check.slack == doctest::Approx(check.product - 0.5));
  CHECK(check.product_at_error_argmax < check.product);
  CHECK(check.product_at_disturbance_argmax < check.product);

  const auto sharper = eq2_check(model(0.25), kGrid, spec, spec);
  CHECK(sharper.epsilon_B < check.epsilon_B);
  CHECK(sharper.eta_B > check.eta_B);
}

TEST_CASE("landscape csv") {
  auto spec = default_search_spec(kGrid);
  spec.sigma = {1.0, 1.96};
  spec.coarse_counts = {1, 1, 3};
  spec.max_refine_iters = 0;
  const auto r = maximize([](const WaveFunction& psi) { return moments(psi).delta_x; }, kGrid, spec);
  std::ostringstream out;
  write_trace_csv(out, r);
  CHECK(out.str() == "x0,p0,sigma,value\n0,0,1,1\n0,0,1.4,1.4\n0,0,1.96,1.96\n");
}
