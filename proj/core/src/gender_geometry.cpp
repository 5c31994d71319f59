#include "embfair/gender_geometry.hpp"

#include <Eigen/SVD>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "embfair/data.hpp"
#include "embfair/errors.hpp"

namespace embfair {

TokenFilter token_filter_from_string(const std::string& s) {
  if (s == "all") return TokenFilter::all;
  if (s == "gender_specific_only" || s == "gender-specific-only") return TokenFilter::gender_specific_only;
  if (s == "neutral_only" || s == "neutral-only") return TokenFilter::neutral_only;
  throw ConfigError("unknown token filter: " + s);
}

std::string to_string(TokenFilter f) {
  switch (f) {
    case TokenFilter::all: return "all";
    case TokenFilter::gender_specific_only: return "gender_specific_only";
    case TokenFilter::neutral_only: return "neutral_only";
  }
  return "all";
}

GenderSubspace compute_gender_subspace(const EmbeddingSet& e,
                                       const WordPairList& defining, int k,
                                       int* dropped_pairs) {
  if (k <= 0) throw ConfigError("k must be positive");
  if (k > e.dim) throw ConfigError("k exceeds embedding dimension");

  // Stack centered pair vectors: scatter = C^T C matches
  // 1/2 sum_i sum_{w in D_i} (w - mu_i)^T (w - mu_i) because each pair
  // contributes two centered rows of the form ±(w - mu)/1 whose outer-product
  // sum is twice the one-sided term.
  std::vector<Eigen::RowVectorXd> centered;
  std::vector<int> pair_sign_rows;  // row index of the (female - male)/2 deviation
  int dropped = 0;
  for (const auto& [male_w, female_w] : defining.pairs) {
    int im = e.row(male_w), iw = e.row(female_w);
    if (im < 0 || iw < 0) {
      ++dropped;
      continue;
    }
    Eigen::RowVectorXd vm = e.matrix.row(im), vf = e.matrix.row(iw);
    if (vm.norm() == 0.0 || vf.norm() == 0.0) {
      ++dropped;
      continue;
    }
    Eigen::RowVectorXd mu = 0.5 * (vm + vf);
    centered.push_back(vm - mu);
    centered.push_back(vf - mu);
    pair_sign_rows.push_back(static_cast<int>(centered.size()) - 1);
  }
  if (dropped_pairs) *dropped_pairs = dropped;
  if (centered.empty()) throw DataError("no usable defining pairs");

  Eigen::MatrixXd C(static_cast<Eigen::Index>(centered.size()), e.dim);
  for (size_t i = 0; i < centered.size(); ++i) C.row(static_cast<Eigen::Index>(i)) = centered[i];

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double tol = sv.size() ? sv(0) * 1e-12 : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }
  if (rank == 0) throw DataError("no usable pairs: all centered pair vectors are zero");
  if (k > rank) {
    throw DataError("k=" + std::to_string(k) + " exceeds the " + std::to_string(rank) +
                    " nonzero principal directions of the pair scatter");
  }

  GenderSubspace B;
  B.k = k;
  B.basis = svd.matrixV().leftCols(k).transpose();

  // Orientation: flip each row so the mean of <female - male, b> over pairs
  // is positive; if that projection is exactly zero, fix the sign by the
  // first nonzero coordinate.
  for (int j = 0; j < k; ++j) {
    double s = 0.0;
    for (int r : pair_sign_rows) s += 2.0 * centered[static_cast<size_t>(r)].dot(B.basis.row(j));
    if (s < 0.0) {
      B.basis.row(j) = -B.basis.row(j);
    } else if (s == 0.0) {
      for (Eigen::Index c = 0; c < B.basis.cols(); ++c) {
        if (B.basis(j, c) != 0.0) {
          if (B.basis(j, c) < 0.0) B.basis.row(j) = -B.basis.row(j);
          break;
        }
      }
    }
  }
  return B;
}

double gender_component(const EmbeddingSet& e, const std::string& word,
                        const GenderSubspace& B) {
  if (B.k != 1) throw ConfigError("gender_component requires k=1");
  int i = e.row(word);
  if (i < 0) throw DataError("word not in vocabulary: " + word);
  return e.matrix.row(i).dot(B.direction());
}

std::optional<double> biography_gender_component(const EmbeddingSet& e,
                                                 const std::vector<std::string>& tokens,
                                                 const GenderSubspace& B,
                                                 TokenFilter filter,
                                                 const GenderWordList& gender_words) {
  if (B.k != 1) throw ConfigError("biography_gender_component requires k=1");
  double sum = 0.0;
  long n = 0;
  for (const auto& t : tokens) {
    int i = e.row(t);
    if (i < 0) continue;
    bool gendered = gender_words.contains(t);
    if (filter == TokenFilter::gender_specific_only && !gendered) continue;
    if (filter == TokenFilter::neutral_only && gendered) continue;
    sum += e.matrix.row(i).dot(B.direction());
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

GenderComponentStats gender_component_distribution(
    const EmbeddingSet& e, const std::vector<Biography>& bios,
    const GenderSubspace& B, TokenFilter filter,
    const GenderWordList& gender_words, int num_bins) {
  if (bios.empty()) throw DataError("empty dataset");
  if (num_bins <= 0) throw ConfigError("bins must be positive");

  GenderComponentStats s;
  s.filter = filter;
  double sum_f = 0, sum_m = 0;
  for (const auto& b : bios) {
    auto c = biography_gender_component(e, b.tokens, B, filter, gender_words);
    if (!c) {
      ++s.excluded;
      continue;
    }
    s.per_biography.emplace_back(b.id, *c, b.gender);
    if (b.gender == 1) {
      sum_f += *c;
      ++s.n_female;
    } else {
      sum_m += *c;
      ++s.n_male;
    }
  }
  if (s.per_biography.empty()) throw DataError("all biographies empty after filtering");

  double nan = std::numeric_limits<double>::quiet_NaN();
  s.mean_female = s.n_female ? sum_f / static_cast<double>(s.n_female) : nan;
  s.mean_male = s.n_male ? sum_m / static_cast<double>(s.n_male) : nan;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [id, c, g] : s.per_biography) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  double width = (hi - lo) / num_bins;
  if (width == 0.0) width = 1.0;  // all components identical; single shared bin
  s.bins.resize(static_cast<size_t>(num_bins));
  for (int i = 0; i < num_bins; ++i) {
    s.bins[static_cast<size_t>(i)].low = lo + i * width;
    s.bins[static_cast<size_t>(i)].high = lo + (i + 1) * width;
  }
  for (const auto& [id, c, g] : s.per_biography) {
    int idx = static_cast<int>((c - lo) / width);
    idx = std::clamp(idx, 0, num_bins - 1);
    if (g == 1) {
      ++s.bins[static_cast<size_t>(idx)].count_female;
    } else {
      ++s.bins[static_cast<size_t>(idx)].count_male;
    }
  }
  return s;
}

void write_component_csv(const GenderComponentStats& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "bin_low,bin_high,count_female,count_male\n";
  char buf[128];
  for (const auto& b : s.bins) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%ld,%ld\n", b.low, b.high,
                  b.count_female, b.count_male);
    out << buf;
  }
}

void write_component_json(const GenderComponentStats& s, const std::string& path) {
  nlohmann::json j;
  j["mean_female"] = std::isnan(s.mean_female) ? nlohmann::json() : nlohmann::json(s.mean_female);
  j["mean_male"] = std::isnan(s.mean_male) ? nlohmann::json() : nlohmann::json(s.mean_male);
  j["excluded_count"] = s.excluded;
  j["filter"] = to_string(s.filter);
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(1) << '\n';
}

}  // namespace embfair
