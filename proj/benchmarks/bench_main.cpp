// Micro-benchmarks for the hot paths: DEX parsing, strategy classification,
// and rank correlation. Inputs are synthesized deterministically so numbers
// are comparable across runs.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "adlens/catalog.hpp"
#include "adlens/detect.hpp"
#include "adlens/forge.hpp"
#include "adlens/frontend.hpp"
#include "adlens/rng.hpp"
#include "adlens/stats.hpp"
#include "adlens/strategy.hpp"

#include "dex_builder.hpp"

namespace {

std::vector<std::uint8_t> make_dex(int classes, int calls_per_class) {
  dexbuild::DexBuilder b;
  for (int c = 0; c < classes; ++c) {
    std::vector<std::uint16_t> code;
    for (int i = 0; i < calls_per_class; ++i)
      dexbuild::append(
          code, dexbuild::ins_invoke(
                    0x6e, b.method("Lcom/lib/T" + std::to_string(i % 7) + ";",
                                   "m" + std::to_string(i % 13), i % 3)));
    dexbuild::append(code, dexbuild::ins_return_void());
    b.add_method("Lcom/app/C" + std::to_string(c) + ";", "run", 0, code);
  }
  return b.build();
}

void bm_parse_dex(benchmark::State& state) {
  auto bytes = make_dex(static_cast<int>(state.range(0)), 20);
  for (auto _ : state) {
    auto classes = adlens::parse_dex(bytes);
    benchmark::DoNotOptimize(classes);
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(bm_parse_dex)->Arg(16)->Arg(128)->Arg(1024);

void bm_classify_strategy(benchmark::State& state) {
  adlens::AdLibraryCatalog catalog = adlens::seed_catalog();
  adlens::FixtureSpec spec;
  spec.seed = 5;
  spec.app_count = static_cast<int>(state.range(0));
  spec.role_mix = {{adlens::AppRole::AdDisplaying, 1.0}};
  spec.strategy_mix = {{adlens::IntegrationStrategy::Mixed, 0.4},
                       {adlens::IntegrationStrategy::SelfMediation, 0.3},
                       {adlens::IntegrationStrategy::Scattered, 0.3}};
  adlens::ForgeResult r = adlens::generate(spec, catalog);
  for (auto _ : state) {
    for (const auto& [id, lineage] : r.corpus.lineages) {
      auto result = adlens::classify_strategy(lineage.latest(), catalog);
      benchmark::DoNotOptimize(result);
    }
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_classify_strategy)->Arg(32)->Arg(256);

void bm_spearman(benchmark::State& state) {
  adlens::Rng rng(9);
  size_t n = static_cast<size_t>(state.range(0));
  std::vector<double> x(n), y(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(rng.below(1000));
    y[i] = static_cast<double>(rng.below(1000));
  }
  for (auto _ : state) {
    auto r = adlens::spearman(x, y);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_spearman)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
