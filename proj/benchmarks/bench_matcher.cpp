#include <benchmark/benchmark.h>

#include "common.hpp"
#include "revpat/compiled_pattern.hpp"
#include "revpat/pattern.hpp"

namespace {

const char* const kPatterns[] = {
    "SEQ(lit(please), pos(VB))",
    "SEQ(lit(keeps), lit(crashing))",
    "OR(ent(software bug), ent(software update))",
    "SEQ(REP(pos(NN)), lit(anymore))",
    "SEQ(*, AND(pos(VB), NOT(lit(is))), *)",
};

void BM_DocMatch(benchmark::State& state) {
  const auto docs = bench::documents();
  const auto pattern = revpat::parse_dsl(kPatterns[state.range(0)]);
  for (auto _ : state) {
    std::size_t hits = 0;
    for (const auto& d : docs) hits += revpat::doc_match(pattern, d);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * docs.size()));
  state.SetLabel(kPatterns[state.range(0)]);
}
BENCHMARK(BM_DocMatch)->DenseRange(0, 4);

void BM_CompiledMatch(benchmark::State& state) {
  const auto docs = bench::documents();
  const revpat::EncodedCorpus encoded(docs);
  const revpat::CompiledPattern pattern(revpat::parse_dsl(kPatterns[state.range(0)]), encoded);
  for (auto _ : state) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < encoded.size(); ++i) hits += pattern.matches(i);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * docs.size()));
  state.SetLabel(kPatterns[state.range(0)]);
}
BENCHMARK(BM_CompiledMatch)->DenseRange(0, 4);

void BM_Compile(benchmark::State& state) {
  const auto docs = bench::documents();
  const revpat::EncodedCorpus encoded(docs);
  const auto pattern = revpat::parse_dsl(kPatterns[4]);
  for (auto _ : state) benchmark::DoNotOptimize(revpat::CompiledPattern(pattern, encoded));
}
BENCHMARK(BM_Compile);

void BM_ParseDsl(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(revpat::parse_dsl(kPatterns[4]));
}
BENCHMARK(BM_ParseDsl);

}  // namespace

BENCHMARK_MAIN();
