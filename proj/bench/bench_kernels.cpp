#include <benchmark/benchmark.h>

#include "fairness/kernels.hpp"

using namespace fairness;

namespace {

const PopulationModel& population() {
  static const PopulationModel pop(
      {Group{"men", ConditionalScoreDensity::calibrated_with_base_rate(1024, 0.3)},
       Group{"women", ConditionalScoreDensity::calibrated_with_base_rate(1024, 0.6)}});
  return pop;
}

const DecisionRule& rule() {
  static const DecisionRule r = [] {
    DecisionRule d;
    d.set("men", Deterministic{0.5}).set("women", Randomized{0.6, 0.8, 0.4});
    return d;
  }();
  return r;
}

template <AuditDataset (*Kernel)(const PopulationModel&, std::size_t, std::uint64_t,
                                 const DecisionRule*)>
void bm_sample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(population(), n, 42, &rule()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <kernels::Tally (*Kernel)(const AuditDataset&, std::size_t)>
void bm_tally(benchmark::State& state) {
  const auto data = kernels::sample_parallel(population(), state.range(0), 42, &rule());
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(data, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <MonteCarloEstimate (*Kernel)(const ScoreDensity&, const ScoreMap&, const PayoffMatrix&,
                                       double, std::size_t, std::uint64_t)>
void bm_utility(benchmark::State& state) {
  const auto f = ScoreDensity::uniform(1024);
  const auto map = ScoreMap::from_function(1024, [](double p) { return p * p; });
  const auto pay = PayoffMatrix::recommender();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(f, map, pay, 0.5, state.range(0), 42));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(bm_sample<kernels::sample_serial>)->Name("sample/serial")->Arg(1 << 20);
BENCHMARK(bm_sample<kernels::sample_parallel>)->Name("sample/parallel")->Arg(1 << 20);
BENCHMARK(bm_tally<kernels::tally_serial>)->Name("tally/serial")->Arg(1 << 20);
BENCHMARK(bm_tally<kernels::tally_parallel>)->Name("tally/parallel")->Arg(1 << 20);
BENCHMARK(bm_utility<kernels::utility_serial>)->Name("utility/serial")->Arg(1 << 20);
BENCHMARK(bm_utility<kernels::utility_parallel>)->Name("utility/parallel")->Arg(1 << 20);

BENCHMARK_MAIN();
