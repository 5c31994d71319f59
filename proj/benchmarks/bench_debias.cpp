#include <benchmark/benchmark.h>

#include "embfair/data.hpp"
#include "embfair/debias.hpp"
#include "embfair/gender_geometry.hpp"

using namespace embfair;

namespace {

SyntheticCorpus make_corpus(int vocab, int d) {
  SyntheticCorpusSpec spec;
  spec.vocab_size = vocab;
  spec.embed_dim = d;
  spec.num_bios = 1;
  spec.seed = 42;
  return generate_synthetic(spec);
}

void BM_ComputeSubspace(benchmark::State& state) {
  auto c = make_corpus(5000, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto B = compute_gender_subspace(c.embeddings, c.defining, 1);
    benchmark::DoNotOptimize(B.basis);
  }
}
BENCHMARK(BM_ComputeSubspace)->Arg(50)->Arg(100)->Arg(300);

void BM_ProjectOnly(benchmark::State& state) {
  auto c = make_corpus(static_cast<int>(state.range(0)), 50);
  auto B = compute_gender_subspace(c.embeddings, c.defining, 1);
  for (auto _ : state) {
    auto out = project_only(c.embeddings, B);
    benchmark::DoNotOptimize(out.matrix);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProjectOnly)->Arg(5000)->Arg(50000);

void BM_HardDebias(benchmark::State& state) {
  auto c = make_corpus(static_cast<int>(state.range(0)), 50);
  auto B = compute_gender_subspace(c.embeddings, c.defining, 1);
  auto sets = pairs_as_sets(c.equalize);
  for (auto _ : state) {
    auto out = hard_debias(c.embeddings, c.gender_words, sets, B);
    benchmark::DoNotOptimize(out.matrix);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HardDebias)->Arg(5000)->Arg(50000);

void BM_StrongDebias(benchmark::State& state) {
  auto c = make_corpus(static_cast<int>(state.range(0)), 50);
  auto B = compute_gender_subspace(c.embeddings, c.defining, 1);
  auto sets = pairs_as_sets(c.equalize);
  for (auto _ : state) {
    auto out = strong_debias(c.embeddings, sets, B);
    benchmark::DoNotOptimize(out.matrix);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StrongDebias)->Arg(5000)->Arg(50000);

}  // namespace

BENCHMARK_MAIN();
