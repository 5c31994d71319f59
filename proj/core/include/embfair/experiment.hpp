#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "embfair/classifier.hpp"
#include "embfair/data.hpp"
#include "embfair/debias.hpp"
#include "embfair/fairness.hpp"

namespace embfair {

struct ExperimentConfig {
  std::string embeddings_path;
  std::string dataset_path;
  std::string defining_pairs_path;
  std::string equalize_pairs_path;
  std::string gender_words_path;
  std::string output_dir = ".";
  int dim = 100;
  int k = 1;
  std::uint64_t seed = 1;
  DebiasMode mode = DebiasMode::none;
  TrainConfig train;
};

// Loaded and normalized inputs shared across ablation arms.
struct ExperimentInputs {
  EmbeddingSet embeddings;  // unit rows
  WordPairList defining;
  WordPairList equalize;
  GenderWordList gender_words;
  std::vector<Biography> bios;
};

struct RunResult {
  DebiasMode mode = DebiasMode::none;
  FairnessReport report;
  double probe_accuracy = 0.0;
  std::vector<PredictionRecord> predictions;
  TransformReport transform;
  ClassifierModel model;
};

ExperimentInputs load_inputs(const ExperimentConfig& cfg);
ExperimentInputs inputs_from_corpus(SyntheticCorpus&& c);

// Applies the mode's embedding transform; scrub leaves embeddings untouched.
EmbeddingSet apply_debias(const ExperimentInputs& in, DebiasMode mode,
                          const GenderSubspace& B, TransformReport* report = nullptr);

// scrub -> debias -> split -> train -> predict test -> fairness -> probe.
RunResult run_pipeline(const ExperimentInputs& in, DebiasMode mode,
                       const TrainConfig& train, std::uint64_t seed, int k = 1);

}  // namespace embfair
