#pragma once

#include <Eigen/Core>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace embfair {

// Vocabulary + row-per-word vector matrix. Immutable after construction;
// all transforms return new sets.
struct EmbeddingSet {
  std::vector<std::string> words;               // row -> word
  std::unordered_map<std::string, int> index;   // word -> row
  Eigen::MatrixXd matrix;                       // V x d
  int dim = 0;

  int size() const { return static_cast<int>(words.size()); }
  bool contains(const std::string& w) const { return index.count(w) != 0; }
  int row(const std::string& w) const {
    auto it = index.find(w);
    return it == index.end() ? -1 : it->second;
  }
};

enum class PairRole { defining, equalize };

struct WordPairList {
  std::vector<std::pair<std::string, std::string>> pairs;
  PairRole role = PairRole::defining;
};

// Explicit gender-indicator tokens: the scrub vocabulary. The neutral set N
// for hard debias is the vocabulary minus these words.
struct GenderWordList {
  std::unordered_set<std::string> words;
  bool contains(const std::string& w) const { return words.count(w) != 0; }
};

struct LoadReport {
  int duplicate_words = 0;
  int zero_rows = 0;
};

std::string lowercase(std::string s);

// GloVe text format: `word v1 ... vd` per line, UTF-8, no header; a
// word2vec-style header line (two integers) is tolerated and skipped.
// Duplicate words keep the first occurrence. Tokens are lowercased.
EmbeddingSet load_embeddings(const std::string& path, int expected_dim,
                             LoadReport* report = nullptr);

// Each nonzero row scaled to unit norm; zero rows left alone and counted.
EmbeddingSet normalize_rows(const EmbeddingSet& e, int* zero_rows = nullptr);

// JSON array of 2-element string arrays.
WordPairList load_word_pairs(const std::string& path, PairRole role);

// JSON array of strings.
GenderWordList load_gender_words(const std::string& path);

void save_embeddings(const EmbeddingSet& e, const std::string& path);
void save_word_pairs(const WordPairList& pairs, const std::string& path);
void save_gender_words(const GenderWordList& gw, const std::string& path);

}  // namespace embfair
