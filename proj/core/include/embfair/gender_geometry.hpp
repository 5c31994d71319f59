#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "embfair/embeddings.hpp"

namespace embfair {

struct Biography;  // data.hpp

// k orthonormal direction rows. Orientation for k=1: defining pairs are
// ordered (male, female) and the basis is flipped so the female direction is
// positive; negative components read as male-leaning.
struct GenderSubspace {
  Eigen::MatrixXd basis;  // k x d, orthonormal rows
  int k = 1;

  Eigen::RowVectorXd direction() const { return basis.row(0); }
  // Component of v inside the subspace.
  Eigen::RowVectorXd project(const Eigen::RowVectorXd& v) const {
    return (v * basis.transpose()) * basis;
  }
};

enum class TokenFilter { all, gender_specific_only, neutral_only };

TokenFilter token_filter_from_string(const std::string& s);
std::string to_string(TokenFilter f);

struct HistogramBin {
  double low = 0, high = 0;
  long count_female = 0, count_male = 0;
};

struct GenderComponentStats {
  std::vector<std::tuple<std::string, double, int>> per_biography;  // id, component, gender
  double mean_female = 0, mean_male = 0;   // NaN when the gender is absent
  long n_female = 0, n_male = 0;
  long excluded = 0;                        // empty after filtering
  TokenFilter filter = TokenFilter::all;
  std::vector<HistogramBin> bins;
};

// Top-k principal directions of the centered defining-pair scatter, via SVD
// of the stacked centered pair vectors. OOV or zero-vector members drop the
// whole pair.
GenderSubspace compute_gender_subspace(const EmbeddingSet& e,
                                       const WordPairList& defining, int k,
                                       int* dropped_pairs = nullptr);

// Signed projection <w, b>. Requires k=1.
double gender_component(const EmbeddingSet& e, const std::string& word,
                        const GenderSubspace& B);

// Mean gender component over retained token occurrences; nullopt when the
// selection is empty.
std::optional<double> biography_gender_component(const EmbeddingSet& e,
                                                 const std::vector<std::string>& tokens,
                                                 const GenderSubspace& B,
                                                 TokenFilter filter,
                                                 const GenderWordList& gender_words);

GenderComponentStats gender_component_distribution(
    const EmbeddingSet& e, const std::vector<Biography>& bios,
    const GenderSubspace& B, TokenFilter filter,
    const GenderWordList& gender_words, int bins);

void write_component_csv(const GenderComponentStats& s, const std::string& path);
void write_component_json(const GenderComponentStats& s, const std::string& path);

}  // namespace embfair
