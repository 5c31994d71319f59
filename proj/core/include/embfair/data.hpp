#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "embfair/embeddings.hpp"

namespace embfair {

enum class Split { train, dev, test };
std::string to_string(Split s);

struct Biography {
  std::string id;
  std::vector<std::string> tokens;
  std::string occupation;
  int gender = 0;  // female=1, male=0
  Split split = Split::train;
};

struct OccupationCounts {
  long female = 0, male = 0;
  double frac_female() const {
    return static_cast<double>(female) / static_cast<double>(female + male);
  }
};

struct DatasetSummary {
  std::map<std::string, OccupationCounts> per_occupation;
};

struct SyntheticCorpusSpec {
  int vocab_size = 5000;
  int embed_dim = 50;
  int num_occupations = 10;
  int num_bios = 20000;
  double gender_signal_strength = 0.7;      // in [0,1]
  double neutral_noise_strength = 0.3;      // in [0,1]
  double occupation_gender_correlation = 0.8;  // in [0,1]
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  EmbeddingSet embeddings;
  WordPairList defining;
  WordPairList equalize;
  GenderWordList gender_words;
  std::vector<Biography> bios;
  Eigen::VectorXd planted_direction;
};

struct DatasetLoadStats {
  long rejected_unknown_occupation = 0;
  long dropped_empty = 0;
};

// Lowercase; split on whitespace; strip surrounding punctuation, keeping the
// trailing period of short honorific-style tokens (mr., mrs., dr.).
std::vector<std::string> tokenize(const std::string& text);

// JSON-lines: {"id":..., "text":..., "occupation":..., "gender":"F"|"M"}.
// When an occupation inventory is given, bios outside it are rejected with a
// count; otherwise every observed occupation is accepted.
std::vector<Biography> load_dataset(const std::string& path,
                                    const std::vector<std::string>* occupation_inventory = nullptr,
                                    DatasetLoadStats* stats = nullptr);

void save_dataset(const std::vector<Biography>& bios, const std::string& path);

// Deterministic 0.7/0.15/0.15 split from a hash of (id, seed).
Split split_for_id(const std::string& id, std::uint64_t seed);
void assign_splits(std::vector<Biography>& bios, std::uint64_t seed);

DatasetSummary summarize(const std::vector<Biography>& bios);
void write_summary_csv(const DatasetSummary& s, const std::string& path);

SyntheticCorpus generate_synthetic(const SyntheticCorpusSpec& spec);

}  // namespace embfair
