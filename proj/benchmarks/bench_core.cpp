#include <benchmark/benchmark.h>

#include "edlab/channels.hpp"
#include "edlab/edrmetrics.hpp"
#include "edlab/statelib.hpp"
#include "edlab/supsearch.hpp"
#include "edlab/wasserstein.hpp"

using namespace edlab;

namespace {

GridSpec system_grid(benchmark::State& state) {
  return make_grid(static_cast<std::size_t>(state.range(0)), -16.0, 16.0);
}

VonNeumannChannel pointer(std::size_t n_probe) {
  const GridSpec probe = make_grid(n_probe, -16.0, 16.0);
  return std::get<VonNeumannChannel>(make_von_neumann(1.0, make_probe(probe, 0.5)));
}

void BM_ToMomentum(benchmark::State& state) {
  const auto psi = make_state(system_grid(state), GaussianSpec{0.5, 0.25, 1.5});
  for (auto _ : state) benchmark::DoNotOptimize(to_momentum(psi));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ToMomentum)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void BM_Coupling(benchmark::State& state) {
  const auto g = make_grid(256, -16.0, 16.0);
  const auto model = pointer(static_cast<std::size_t>(state.range(0)));
  const auto joint = embed_joint(make_state(g, GaussianSpec{}), model.probe);
  for (auto _ : state) benchmark::DoNotOptimize(apply_von_neumann(joint, model.gain, Direction::forward));
}
BENCHMARK(BM_Coupling)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_OzawaDisturbance(benchmark::State& state) {
  const auto g = make_grid(256, -16.0, 16.0);
  const Channel c = pointer(static_cast<std::size_t>(state.range(0)));
  const auto psi = random_corpus(g, 1, 3, 3).front();
  for (auto _ : state) benchmark::DoNotOptimize(ozawa_disturbance(c, psi, Basis::momentum));
}
BENCHMARK(BM_OzawaDisturbance)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_OzawaError(benchmark::State& state) {
  const auto g = make_grid(256, -16.0, 16.0);
  const auto model = pointer(static_cast<std::size_t>(state.range(0)));
  const auto psi = random_corpus(g, 1, 3, 3).front();
  for (auto _ : state) benchmark::DoNotOptimize(ozawa_error(model, psi));
}
BENCHMARK(BM_OzawaError)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_LundWiseman(benchmark::State& state) {
  const auto g = make_grid(256, -16.0, 16.0);
  const Channel c = pointer(static_cast<std::size_t>(state.range(0)));
  const auto psi = random_corpus(g, 1, 3, 3).front();
  for (auto _ : state) benchmark::DoNotOptimize(lund_wiseman_eta(c, psi, Basis::momentum));
}
BENCHMARK(BM_LundWiseman)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_FlipLundWiseman(benchmark::State& state) {
  const auto psi = random_corpus(system_grid(state), 1, 5, 3).front();
  const Channel c = make_flip();
  for (auto _ : state) benchmark::DoNotOptimize(lund_wiseman_eta(c, psi, Basis::momentum));
}
BENCHMARK(BM_FlipLundWiseman)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Wasserstein2(benchmark::State& state) {
  const auto g = system_grid(state);
  const auto a = distribution(make_state(g, GaussianSpec{-1.0, 0.0, 1.0}), Basis::position);
  const auto b = distribution(make_state(g, GaussianSpec{1.5, 0.0, 2.0}), Basis::position);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein2(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Wasserstein2)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_SupremumSearch(benchmark::State& state) {
  const auto g = make_grid(256, -16.0, 16.0);
  const auto model = pointer(256);
  auto spec = default_search_spec(g);
  spec.coarse_counts = {1, 1, 5};
  const StateMetric metric = [&](const WaveFunction& psi) { return busch_state_error(model, psi); };
  for (auto _ : state) benchmark::DoNotOptimize(maximize(metric, g, spec));
}
BENCHMARK(BM_SupremumSearch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
