#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "embfair/embeddings.hpp"
#include "embfair/gender_geometry.hpp"

namespace embfair {

enum class DebiasMode { none, hard, strong, project_only, equalize_only, scrub };

DebiasMode debias_mode_from_string(const std::string& s);
std::string to_string(DebiasMode m);

struct TransformReport {
  int oov_words = 0;        // requested words absent from the vocabulary
  int skipped_sets = 0;     // equality sets with <2 in-vocabulary members
  int skipped_pairs = 0;    // degenerate equalize-only pairs
  std::vector<std::string> skipped_words;  // parallel-to-B or zero-deviation words
  int degenerate_members = 0;

  void merge(const TransformReport& o);
  std::string to_json() const;
};

// Remove each word's component inside B and renormalize. Words whose
// orthogonal component is near zero are skipped and reported.
EmbeddingSet neutralize(const EmbeddingSet& e,
                        const std::unordered_set<std::string>& words,
                        const GenderSubspace& B, TransformReport* report = nullptr);

// Re-embed each equality set so members share the orthogonal-to-B component
// of the set mean and differ only inside B, at unit norm.
EmbeddingSet equalize(const EmbeddingSet& e,
                      const std::vector<std::vector<std::string>>& sets,
                      const GenderSubspace& B, TransformReport* report = nullptr);

// Neutralize N = vocabulary minus gender-specific words, then equalize.
EmbeddingSet hard_debias(const EmbeddingSet& e, const GenderWordList& gender_specific,
                         const std::vector<std::vector<std::string>>& equalize_sets,
                         const GenderSubspace& B, TransformReport* report = nullptr);

// Neutralize the whole vocabulary, then collapse each equality set to the
// shared vector nu/|nu| (the normalized orthogonal component of the set mean).
EmbeddingSet strong_debias(const EmbeddingSet& e,
                           const std::vector<std::vector<std::string>>& equalize_sets,
                           const GenderSubspace& B, TransformReport* report = nullptr);

// Neutralize the whole vocabulary; no equalization.
EmbeddingSet project_only(const EmbeddingSet& e, const GenderSubspace& B,
                          TransformReport* report = nullptr);

// Replace both members of each pair by their normalized mean.
EmbeddingSet equalize_only(const EmbeddingSet& e, const WordPairList& pairs,
                           const GenderSubspace& B, TransformReport* report = nullptr);

// Text-level baseline: drop explicit gender-indicator tokens.
std::vector<std::string> scrub_tokens(const std::vector<std::string>& tokens,
                                      const GenderWordList& gender_words,
                                      int* scrubbed = nullptr);

std::vector<std::vector<std::string>> pairs_as_sets(const WordPairList& pairs);

}  // namespace embfair
