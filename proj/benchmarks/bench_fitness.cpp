#include <benchmark/benchmark.h>

#include "common.hpp"
#include "revpat/gp.hpp"

namespace {

struct Sets {
  std::vector<revpat::Document> pos, neg;
};

const Sets& defect_sets() {
  static const Sets sets = [] {
    Sets s;
    for (const auto& ex : bench::corpus()) {
      if (auto label = ex.labels.get(revpat::FeedbackType::Defect)) (*label ? s.pos : s.neg).push_back(ex.document);
    }
    return s;
  }();
  return sets;
}

std::vector<revpat::Individual> population(std::size_t size) {
  const auto& s = defect_sets();
  revpat::GpConfig config;
  config.population_size = size;
  const auto pool = revpat::mine_terminal_pool(s.pos, s.neg, config, bench::gazetteer());
  revpat::Rng rng(1);
  return revpat::init_population(config, pool, rng);
}

// A fresh evaluator each iteration, so nothing comes from the cache.
void BM_EvaluatePopulation(benchmark::State& state) {
  const auto& s = defect_sets();
  const auto base = population(100);
  const auto jobs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto pop = base;
    revpat::FitnessEvaluator ev(s.pos, s.neg, 0.3, jobs);
    ev.evaluate(pop);
    benchmark::DoNotOptimize(pop.front().fitness);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * base.size()));
}
BENCHMARK(BM_EvaluatePopulation)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_EvaluateCached(benchmark::State& state) {
  const auto& s = defect_sets();
  auto pop = population(100);
  revpat::FitnessEvaluator ev(s.pos, s.neg, 0.3);
  ev.evaluate(pop);
  for (auto _ : state) {
    ev.evaluate(pop);
    benchmark::DoNotOptimize(pop.front().fitness);
  }
}
BENCHMARK(BM_EvaluateCached)->Unit(benchmark::kMicrosecond);

void BM_EvolveOnePattern(benchmark::State& state) {
  const auto& s = defect_sets();
  revpat::GpConfig config;
  config.max_generations = static_cast<std::size_t>(state.range(0));
  const auto pool = revpat::mine_terminal_pool(s.pos, s.neg, config, bench::gazetteer());
  for (auto _ : state) {
    revpat::Rng rng(7);
    benchmark::DoNotOptimize(revpat::evolve_one_pattern(s.pos, s.neg, config, pool, rng));
  }
}
BENCHMARK(BM_EvolveOnePattern)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
