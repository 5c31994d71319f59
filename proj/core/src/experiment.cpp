#include "embfair/experiment.hpp"

#include "embfair/errors.hpp"
#include "embfair/gender_geometry.hpp"

namespace embfair {

ExperimentInputs load_inputs(const ExperimentConfig& cfg) {
  ExperimentInputs in;
  in.embeddings = normalize_rows(load_embeddings(cfg.embeddings_path, cfg.dim));
  in.defining = load_word_pairs(cfg.defining_pairs_path, PairRole::defining);
  in.equalize = load_word_pairs(cfg.equalize_pairs_path, PairRole::equalize);
  in.gender_words = load_gender_words(cfg.gender_words_path);
  in.bios = load_dataset(cfg.dataset_path);
  return in;
}

ExperimentInputs inputs_from_corpus(SyntheticCorpus&& c) {
  ExperimentInputs in;
  in.embeddings = std::move(c.embeddings);
  in.defining = std::move(c.defining);
  in.equalize = std::move(c.equalize);
  in.gender_words = std::move(c.gender_words);
  in.bios = std::move(c.bios);
  return in;
}

EmbeddingSet apply_debias(const ExperimentInputs& in, DebiasMode mode,
                          const GenderSubspace& B, TransformReport* report) {
  switch (mode) {
    case DebiasMode::none:
    case DebiasMode::scrub:
      return in.embeddings;
    case DebiasMode::hard:
      return hard_debias(in.embeddings, in.gender_words, pairs_as_sets(in.equalize), B, report);
    case DebiasMode::strong:
      return strong_debias(in.embeddings, pairs_as_sets(in.equalize), B, report);
    case DebiasMode::project_only:
      return project_only(in.embeddings, B, report);
    case DebiasMode::equalize_only:
      return equalize_only(in.embeddings, in.equalize, B, report);
  }
  throw ConfigError("unhandled debias mode");
}

RunResult run_pipeline(const ExperimentInputs& in, DebiasMode mode,
                       const TrainConfig& train, std::uint64_t seed, int k) {
  RunResult res;
  res.mode = mode;

  GenderSubspace B = compute_gender_subspace(in.embeddings, in.defining, k);
  EmbeddingSet emb = apply_debias(in, mode, B, &res.transform);

  std::vector<Biography> bios = in.bios;
  if (mode == DebiasMode::scrub) {
    for (auto& b : bios) b.tokens = scrub_tokens(b.tokens, in.gender_words);
  }
  assign_splits(bios, seed);

  TrainConfig cfg = train;
  cfg.seed = seed;
  res.model = train_classifier(bios, emb, cfg);

  for (const auto& b : bios) {
    if (b.split != Split::test) continue;
    PredictionRecord p;
    p.id = b.id;
    p.true_occupation = b.occupation;
    p.gender = b.gender;
    auto pred = predict(res.model, emb, b.tokens);
    int idx = pred ? pred->first : res.model.majority_label;
    p.predicted_occupation = res.model.labels[static_cast<size_t>(idx)];
    res.predictions.push_back(std::move(p));
  }
  res.report = build_report(res.predictions);
  res.probe_accuracy = train_gender_probe(res.model, emb, bios, cfg).second;
  return res;
}

}  // namespace embfair
