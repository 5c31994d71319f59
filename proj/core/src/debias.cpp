#include "embfair/debias.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

#include "embfair/errors.hpp"

namespace embfair {

namespace {
constexpr double kParallelTol = 1e-9;
}

DebiasMode debias_mode_from_string(const std::string& s) {
  if (s == "none") return DebiasMode::none;
  if (s == "hard") return DebiasMode::hard;
  if (s == "strong") return DebiasMode::strong;
  if (s == "project-only" || s == "project_only") return DebiasMode::project_only;
  if (s == "equalize-only" || s == "equalize_only") return DebiasMode::equalize_only;
  if (s == "scrub") return DebiasMode::scrub;
  throw ConfigError("unknown debias mode: " + s);
}

std::string to_string(DebiasMode m) {
  switch (m) {
    case DebiasMode::none: return "none";
    case DebiasMode::hard: return "hard";
    case DebiasMode::strong: return "strong";
    case DebiasMode::project_only: return "project-only";
    case DebiasMode::equalize_only: return "equalize-only";
    case DebiasMode::scrub: return "scrub";
  }
  return "none";
}

void TransformReport::merge(const TransformReport& o) {
  oov_words += o.oov_words;
  skipped_sets += o.skipped_sets;
  skipped_pairs += o.skipped_pairs;
  degenerate_members += o.degenerate_members;
  skipped_words.insert(skipped_words.end(), o.skipped_words.begin(), o.skipped_words.end());
}

std::string TransformReport::to_json() const {
  nlohmann::json j;
  j["oov_words"] = oov_words;
  j["skipped_sets"] = skipped_sets;
  j["skipped_pairs"] = skipped_pairs;
  j["degenerate_members"] = degenerate_members;
  j["skipped_words"] = skipped_words;
  return j.dump(1);
}

namespace {

void neutralize_row(Eigen::MatrixXd& m, int i, const GenderSubspace& B,
                    const std::string& word, TransformReport& rep) {
  Eigen::RowVectorXd v = m.row(i);
  Eigen::RowVectorXd ortho = v - B.project(v);
  double n = ortho.norm();
  if (n < kParallelTol) {
    rep.skipped_words.push_back(word);
    return;
  }
  m.row(i) = ortho / n;
}

}  // namespace

EmbeddingSet neutralize(const EmbeddingSet& e,
                        const std::unordered_set<std::string>& words,
                        const GenderSubspace& B, TransformReport* report) {
  EmbeddingSet out = e;
  TransformReport rep;
  // Deterministic order regardless of set iteration order.
  for (int i = 0; i < e.size(); ++i) {
    if (!words.count(e.words[static_cast<size_t>(i)])) continue;
    neutralize_row(out.matrix, i, B, e.words[static_cast<size_t>(i)], rep);
  }
  for (const auto& w : words) {
    if (!e.contains(w)) ++rep.oov_words;
  }
  if (report) report->merge(rep);
  return out;
}

EmbeddingSet equalize(const EmbeddingSet& e,
                      const std::vector<std::vector<std::string>>& sets,
                      const GenderSubspace& B, TransformReport* report) {
  EmbeddingSet out = e;
  TransformReport rep;
  for (const auto& set : sets) {
    std::vector<int> rows;
    for (const auto& w : set) {
      int i = e.row(w);
      if (i >= 0) {
        rows.push_back(i);
      } else {
        ++rep.oov_words;
      }
    }
    if (rows.size() < 2) {
      ++rep.skipped_sets;
      continue;
    }
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(e.dim);
    for (int i : rows) mu += e.matrix.row(i);
    mu /= static_cast<double>(rows.size());
    Eigen::RowVectorXd mu_in = B.project(mu);
    Eigen::RowVectorXd nu = mu - mu_in;  // orthogonal-to-B component
    double scale = std::sqrt(std::max(0.0, 1.0 - nu.squaredNorm()));
    for (int i : rows) {
      Eigen::RowVectorXd w_in = B.project(Eigen::RowVectorXd(e.matrix.row(i)));
      Eigen::RowVectorXd dev = w_in - mu_in;
      double n = dev.norm();
      if (n < kParallelTol) {
        double nn = nu.norm();
        if (nn < kParallelTol) {
          rep.skipped_words.push_back(e.words[static_cast<size_t>(i)]);
          continue;
        }
        out.matrix.row(i) = nu / nn;
        ++rep.degenerate_members;
        continue;
      }
      out.matrix.row(i) = nu + scale * dev / n;
    }
  }
  if (report) report->merge(rep);
  return out;
}

EmbeddingSet hard_debias(const EmbeddingSet& e, const GenderWordList& gender_specific,
                         const std::vector<std::vector<std::string>>& equalize_sets,
                         const GenderSubspace& B, TransformReport* report) {
  std::unordered_set<std::string> neutral;
  for (const auto& w : e.words) {
    if (!gender_specific.contains(w)) neutral.insert(w);
  }
  TransformReport rep;
  EmbeddingSet out = neutralize(e, neutral, B, &rep);
  out = equalize(out, equalize_sets, B, &rep);
  if (report) report->merge(rep);
  return out;
}

EmbeddingSet strong_debias(const EmbeddingSet& e,
                           const std::vector<std::vector<std::string>>& equalize_sets,
                           const GenderSubspace& B, TransformReport* report) {
  TransformReport rep;
  EmbeddingSet out = project_only(e, B, &rep);
  // Collapse each set to the shared normalized orthogonal component of the
  // original set mean; the hard-equalize formula would divide by zero here
  // since every in-B deviation is gone after full projection.
  for (const auto& set : equalize_sets) {
    std::vector<int> rows;
    for (const auto& w : set) {
      int i = e.row(w);
      if (i >= 0) {
        rows.push_back(i);
      } else {
        ++rep.oov_words;
      }
    }
    if (rows.size() < 2) {
      ++rep.skipped_sets;
      continue;
    }
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(e.dim);
    for (int i : rows) mu += e.matrix.row(i);
    mu /= static_cast<double>(rows.size());
    Eigen::RowVectorXd nu = mu - B.project(mu);
    double n = nu.norm();
    if (n < kParallelTol) {
      ++rep.skipped_sets;
      continue;
    }
    for (int i : rows) out.matrix.row(i) = nu / n;
  }
  if (report) report->merge(rep);
  return out;
}

EmbeddingSet project_only(const EmbeddingSet& e, const GenderSubspace& B,
                          TransformReport* report) {
  EmbeddingSet out = e;
  TransformReport rep;
  for (int i = 0; i < e.size(); ++i) {
    neutralize_row(out.matrix, i, B, e.words[static_cast<size_t>(i)], rep);
  }
  if (report) report->merge(rep);
  return out;
}

EmbeddingSet equalize_only(const EmbeddingSet& e, const WordPairList& pairs,
                           const GenderSubspace& B, TransformReport* report) {
  (void)B;  // the pair mean does not depend on the subspace
  EmbeddingSet out = e;
  TransformReport rep;
  for (const auto& [a, b] : pairs.pairs) {
    int ia = e.row(a), ib = e.row(b);
    if (ia < 0 || ib < 0) {
      ++rep.skipped_pairs;
      continue;
    }
    Eigen::RowVectorXd mu = 0.5 * (e.matrix.row(ia) + e.matrix.row(ib));
    double n = mu.norm();
    if (n < kParallelTol) {
      ++rep.skipped_pairs;
      rep.skipped_words.push_back(a);
      rep.skipped_words.push_back(b);
      continue;
    }
    out.matrix.row(ia) = mu / n;
    out.matrix.row(ib) = mu / n;
  }
  if (report) report->merge(rep);
  return out;
}

std::vector<std::string> scrub_tokens(const std::vector<std::string>& tokens,
                                      const GenderWordList& gender_words,
                                      int* scrubbed) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  int removed = 0;
  for (const auto& t : tokens) {
    if (gender_words.contains(t)) {
      ++removed;
    } else {
      out.push_back(t);
    }
  }
  if (scrubbed) *scrubbed = removed;
  return out;
}

std::vector<std::vector<std::string>> pairs_as_sets(const WordPairList& pairs) {
  std::vector<std::vector<std::string>> sets;
  sets.reserve(pairs.pairs.size());
  for (const auto& [a, b] : pairs.pairs) sets.push_back({a, b});
  return sets;
}

}  // namespace embfair
