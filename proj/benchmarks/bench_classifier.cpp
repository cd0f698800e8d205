#include <benchmark/benchmark.h>

#include <memory>

#include "common.hpp"
#include "revpat/classifier.hpp"

namespace {

void BM_Featurize(benchmark::State& state) {
  const auto docs = bench::documents();
  const auto space = revpat::fit_feature_space(docs);
  for (auto _ : state) {
    for (const auto& d : docs) benchmark::DoNotOptimize(revpat::featurize(d, space));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * docs.size()));
}
BENCHMARK(BM_Featurize)->Unit(benchmark::kMillisecond);

void BM_FitFeatureSpace(benchmark::State& state) {
  const auto docs = bench::documents();
  for (auto _ : state) benchmark::DoNotOptimize(revpat::fit_feature_space(docs));
}
BENCHMARK(BM_FitFeatureSpace)->Unit(benchmark::kMillisecond);

void BM_Train(benchmark::State& state) {
  std::vector<revpat::Document> docs;
  std::vector<char> labels;
  for (const auto& ex : bench::corpus()) {
    if (auto label = ex.labels.get(revpat::FeedbackType::Defect)) {
      docs.push_back(ex.document);
      labels.push_back(*label);
    }
  }
  revpat::Hyperparameters h;
  h.epochs = static_cast<std::size_t>(state.range(0));
  const std::span<const bool> y(reinterpret_cast<const bool*>(labels.data()), labels.size());
  for (auto _ : state) benchmark::DoNotOptimize(revpat::train(docs, y, h));
}
BENCHMARK(BM_Train)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
