#include <benchmark/benchmark.h>

#include "embfair/classifier.hpp"
#include "embfair/data.hpp"

using namespace embfair;

namespace {

void BM_TrainClassifier(benchmark::State& state) {
  SyntheticCorpusSpec spec;
  spec.vocab_size = 2000;
  spec.embed_dim = 32;
  spec.num_occupations = 4;
  spec.num_bios = static_cast<int>(state.range(0));
  spec.seed = 42;
  auto c = generate_synthetic(spec);
  TrainConfig cfg;
  cfg.epochs = 2;
  for (auto _ : state) {
    auto m = train_classifier(c.bios, c.embeddings, cfg);
    benchmark::DoNotOptimize(m.W1);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * cfg.epochs);
}
BENCHMARK(BM_TrainClassifier)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_ClassifierLoss(benchmark::State& state) {
  SyntheticCorpusSpec spec;
  spec.vocab_size = 2000;
  spec.embed_dim = 32;
  spec.num_occupations = 4;
  spec.num_bios = 64;
  spec.seed = 42;
  auto c = generate_synthetic(spec);
  TrainConfig cfg;
  std::vector<std::string> labels;
  for (int i = 0; i < 4; ++i) labels.push_back("occ" + std::to_string(i));
  auto m = init_classifier(c.embeddings, labels, cfg);
  std::vector<EncodedExample> batch;
  for (const auto& b : c.bios) {
    if (auto ex = encode_example(c.embeddings, m, b)) batch.push_back(*ex);
  }
  ModelGrads g;
  g.resize_like(m);
  for (auto _ : state) {
    g.set_zero();
    double loss = classifier_loss(m, c.embeddings, batch, &g);
    benchmark::DoNotOptimize(loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(batch.size()));
}
BENCHMARK(BM_ClassifierLoss);

}  // namespace

BENCHMARK_MAIN();
