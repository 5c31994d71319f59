#include "embfair/data.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "embfair/errors.hpp"
#include "embfair/rng.hpp"

namespace embfair {

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

namespace {

const std::unordered_set<std::string>& honorifics() {
  static const std::unordered_set<std::string> h = {
      "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.", "sr."};
  return h;
}

bool is_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t j = i;
    while (j < n && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string tok = lowercase(text.substr(i, j - i));
      size_t a = 0, b = tok.size();
      while (a < b && is_punct(tok[a])) ++a;
      size_t bstrip = b;
      while (bstrip > a && is_punct(tok[bstrip - 1])) --bstrip;
      std::string core = tok.substr(a, bstrip - a);
      // Keep the trailing period of honorifics so they survive for
      // scrubbing and equalizing.
      if (!core.empty() && bstrip < b && honorifics().count(core + ".")) {
        core += ".";
      }
      if (!core.empty()) out.push_back(std::move(core));
    }
    i = j;
  }
  return out;
}

std::vector<Biography> load_dataset(const std::string& path,
                                    const std::vector<std::string>* occupation_inventory,
                                    DatasetLoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path);

  std::unordered_set<std::string> inventory;
  if (occupation_inventory) {
    inventory.insert(occupation_inventory->begin(), occupation_inventory->end());
  }

  std::vector<Biography> bios;
  DatasetLoadStats st;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed JSON: " + ex.what());
    }
    for (const char* key : {"id", "text", "occupation", "gender"}) {
      if (!j.contains(key)) {
        throw DataError(path + ":" + std::to_string(lineno) + ": missing field '" + key + "'");
      }
    }
    std::string gender = j["gender"].get<std::string>();
    if (gender != "F" && gender != "M") {
      throw DataError(path + ":" + std::to_string(lineno) + ": gender must be \"F\" or \"M\"");
    }
    Biography b;
    b.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    b.occupation = lowercase(j["occupation"].get<std::string>());
    b.gender = gender == "F" ? 1 : 0;
    b.tokens = tokenize(j["text"].get<std::string>());
    if (occupation_inventory && !inventory.count(b.occupation)) {
      ++st.rejected_unknown_occupation;
      continue;
    }
    if (b.tokens.empty()) {
      ++st.dropped_empty;
      continue;
    }
    bios.push_back(std::move(b));
  }
  if (stats) *stats = st;
  return bios;
}

void save_dataset(const std::vector<Biography>& bios, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (const auto& b : bios) {
    nlohmann::json j;
    j["id"] = b.id;
    std::string text;
    for (size_t i = 0; i < b.tokens.size(); ++i) {
      if (i) text += ' ';
      text += b.tokens[i];
    }
    j["text"] = text;
    j["occupation"] = b.occupation;
    j["gender"] = b.gender == 1 ? "F" : "M";
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

Split split_for_id(const std::string& id, std::uint64_t seed) {
  double u = unit_hash(id, seed);
  if (u < 0.7) return Split::train;
  if (u < 0.85) return Split::dev;
  return Split::test;
}

void assign_splits(std::vector<Biography>& bios, std::uint64_t seed) {
  std::unordered_set<std::string> seen;
  for (auto& b : bios) {
    if (!seen.insert(b.id).second) throw DataError("duplicate biography id: " + b.id);
    b.split = split_for_id(b.id, seed);
  }
}

DatasetSummary summarize(const std::vector<Biography>& bios) {
  DatasetSummary s;
  for (const auto& b : bios) {
    auto& c = s.per_occupation[b.occupation];
    if (b.gender == 1) {
      ++c.female;
    } else {
      ++c.male;
    }
  }
  return s;
}

void write_summary_csv(const DatasetSummary& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "occupation,female,male,frac_female\n";
  char buf[64];
  for (const auto& [occ, c] : s.per_occupation) {
    std::snprintf(buf, sizeof(buf), ",%ld,%ld,%.6f\n", c.female, c.male, c.frac_female());
    out << occ << buf;
  }
}

namespace {

// Random unit vector orthogonal to g.
Eigen::VectorXd random_ortho_unit(std::mt19937_64& rng, const Eigen::VectorXd& g) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd v(g.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = nd(rng);
  v -= v.dot(g) * g;
  double n = v.norm();
  if (n < 1e-12) return random_ortho_unit(rng, g);
  return v / n;
}

Eigen::VectorXd with_gender_component(const Eigen::VectorXd& ortho_unit, double eps) {
  // caller adds eps * g separately
  return std::sqrt(std::max(0.0, 1.0 - eps * eps)) * ortho_unit;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticCorpusSpec& spec) {
  if (spec.vocab_size <= 0 || spec.embed_dim <= 1 || spec.num_occupations <= 1 ||
      spec.num_bios <= 0) {
    throw ConfigError("invalid synthetic corpus spec");
  }
  for (double v : {spec.gender_signal_strength, spec.neutral_noise_strength,
                   spec.occupation_gender_correlation}) {
    if (v < 0.0 || v > 1.0) throw ConfigError("synthetic strengths must lie in [0,1]");
  }

  const int num_pairs = 20;
  const int num_defining = 10;
  const int topic_words_per_occ = 60;
  const int min_filler = 200;
  const int reserved = 2 * num_pairs + spec.num_occupations * topic_words_per_occ;
  if (spec.vocab_size < reserved + min_filler) {
    throw ConfigError("vocab_size too small: need at least " +
                      std::to_string(reserved + min_filler) + " words");
  }
  const int num_filler = spec.vocab_size - reserved;
  const int d = spec.embed_dim;
  const int C = spec.num_occupations;
  const double s = spec.gender_signal_strength;
  const double noise = spec.neutral_noise_strength;

  // Shape constants for the planted structure.
  const double pair_asym = 0.02 + 0.15 * s;  // residual pair difference off the gender axis
  const double pair_topic_mix = 0.6;     // occupation content inside gendered words
  const double twin_offset = 0.18;       // separation of confusable occupation twins
  const double twin_confusion = 0.35;    // topic tokens drawn from the twin's pool
  const double topic_spread = 0.9;       // word scatter around its topic direction
  const double gendered_token_rate = 0.05;
  const double topic_token_rate = 0.30;  // of neutral tokens
  const double gender_match_prob = 0.95;
  const double occ_pair_prob = 0.5;      // gendered token drawn from an occupation-linked pair
  const double filler_tilt = 0.12 * s;   // gender-conditional filler preference (indirect bias)

  SyntheticCorpus out;
  auto rng = make_rng(spec.seed, "synthetic-corpus");
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);

  // Planted gender direction.
  Eigen::VectorXd g(d);
  for (int i = 0; i < d; ++i) g(i) = nd(rng);
  g.normalize();
  out.planted_direction = g;

  // Occupation topic directions come in confusable twins: occupations 2j and
  // 2j+1 share a base direction and differ by a small offset, so gender (via
  // the occupation gender skew) helps disambiguate them.
  std::vector<Eigen::VectorXd> topic_dir(static_cast<size_t>(C));
  for (int j = 0; j * 2 < C; ++j) {
    Eigen::VectorXd base = random_ortho_unit(rng, g);
    Eigen::VectorXd off = random_ortho_unit(rng, g);
    off -= off.dot(base) * base;
    off.normalize();
    Eigen::VectorXd t0 = (base + twin_offset * off).normalized();
    Eigen::VectorXd t1 = (base - twin_offset * off).normalized();
    topic_dir[static_cast<size_t>(2 * j)] = t0;
    if (2 * j + 1 < C) topic_dir[static_cast<size_t>(2 * j + 1)] = t1;
  }

  std::vector<std::string> words;
  std::vector<Eigen::VectorXd> vecs;
  words.reserve(static_cast<size_t>(spec.vocab_size));
  vecs.reserve(static_cast<size_t>(spec.vocab_size));

  // Gendered pairs: male word at -s along g, female at +s. The two members
  // share most of their orthogonal part; a small s-scaled asymmetry mimics
  // real pairs whose non-gender semantics are not perfectly symmetric.
  std::vector<int> pair_occ(num_pairs);
  for (int i = 0; i < num_pairs; ++i) {
    pair_occ[i] = i % C;
    Eigen::VectorXd u = random_ortho_unit(rng, g);
    Eigen::VectorXd mixed = (pair_topic_mix * topic_dir[static_cast<size_t>(pair_occ[i])] +
                             std::sqrt(1.0 - pair_topic_mix * pair_topic_mix) * u);
    mixed -= mixed.dot(g) * g;
    mixed.normalize();
    Eigen::VectorXd f = random_ortho_unit(rng, g);
    Eigen::VectorXd o_m = (mixed - pair_asym * f);
    o_m -= o_m.dot(g) * g;
    o_m.normalize();
    Eigen::VectorXd o_f = (mixed + pair_asym * f);
    o_f -= o_f.dot(g) * g;
    o_f.normalize();
    words.push_back("hisword" + std::to_string(i));
    vecs.push_back(with_gender_component(o_m, s) - s * g);
    words.push_back("herword" + std::to_string(i));
    vecs.push_back(with_gender_component(o_f, s) + s * g);
  }

  // Occupation topic words: neutral, loosely clustered around their topic
  // direction, with zero-mean gender-axis noise (demeaned per occupation so
  // topic identity alone carries no gender-axis offset).
  std::vector<std::vector<int>> topic_word_idx(static_cast<size_t>(C));
  for (int c = 0; c < C; ++c) {
    std::vector<double> eps(topic_words_per_occ);
    double mean_eps = 0.0;
    for (int j = 0; j < topic_words_per_occ; ++j) {
      eps[static_cast<size_t>(j)] = std::clamp(noise * nd(rng), -0.9, 0.9);
      mean_eps += eps[static_cast<size_t>(j)];
    }
    mean_eps /= topic_words_per_occ;
    for (int j = 0; j < topic_words_per_occ; ++j) {
      double ew = std::clamp(eps[static_cast<size_t>(j)] - mean_eps, -0.9, 0.9);
      Eigen::VectorXd r = random_ortho_unit(rng, g);
      Eigen::VectorXd o = (topic_dir[static_cast<size_t>(c)] + topic_spread * r);
      o -= o.dot(g) * g;
      o.normalize();
      topic_word_idx[static_cast<size_t>(c)].push_back(static_cast<int>(words.size()));
      words.push_back("occ" + std::to_string(c) + "w" + std::to_string(j));
      vecs.push_back(with_gender_component(o, ew) + ew * g);
    }
  }

  // Generic filler: neutral words with zero-mean gender-axis noise. Bios
  // preferentially pick sign-matching filler, which plants the indirect bias.
  std::vector<int> filler_pos, filler_neg;
  std::vector<int> filler_all;
  for (int j = 0; j < num_filler; ++j) {
    double ew = std::clamp(noise * nd(rng), -0.9, 0.9);
    Eigen::VectorXd o = random_ortho_unit(rng, g);
    int idx = static_cast<int>(words.size());
    filler_all.push_back(idx);
    if (ew >= 0.0) {
      filler_pos.push_back(idx);
    } else {
      filler_neg.push_back(idx);
    }
    words.push_back("w" + std::to_string(j));
    vecs.push_back(with_gender_component(o, ew) + ew * g);
  }
  if (filler_pos.empty() || filler_neg.empty()) {
    throw ConfigError("filler pool degenerate; increase vocab_size");
  }

  out.embeddings.words = words;
  out.embeddings.dim = d;
  out.embeddings.matrix.resize(static_cast<Eigen::Index>(words.size()), d);
  for (size_t i = 0; i < words.size(); ++i) {
    out.embeddings.matrix.row(static_cast<Eigen::Index>(i)) = vecs[i].transpose();
    out.embeddings.index.emplace(words[i], static_cast<int>(i));
  }

  for (int i = 0; i < num_pairs; ++i) {
    auto p = std::make_pair("hisword" + std::to_string(i), "herword" + std::to_string(i));
    if (i < num_defining) out.defining.pairs.push_back(p);
    out.equalize.pairs.push_back(p);
    out.gender_words.words.insert(p.first);
    out.gender_words.words.insert(p.second);
  }
  out.defining.role = PairRole::defining;
  out.equalize.role = PairRole::equalize;

  // Pairs linked to each occupation, for occupation-flavored gendered tokens.
  std::vector<std::vector<int>> occ_pairs(static_cast<size_t>(C));
  for (int i = 0; i < num_pairs; ++i) occ_pairs[static_cast<size_t>(pair_occ[i])].push_back(i);

  std::uniform_int_distribution<int> len_dist(30, 80);
  std::uniform_int_distribution<int> occ_dist(0, C - 1);
  std::uniform_int_distribution<int> pair_dist(0, num_pairs - 1);

  out.bios.reserve(static_cast<size_t>(spec.num_bios));
  for (int n = 0; n < spec.num_bios; ++n) {
    Biography b;
    b.id = "bio" + std::to_string(n);
    int occ = occ_dist(rng);
    b.occupation = "occ" + std::to_string(occ);
    double frac_female = 0.5 + 0.5 * spec.occupation_gender_correlation * (occ % 2 == 0 ? 1.0 : -1.0);
    b.gender = ud(rng) < frac_female ? 1 : 0;
    int len = len_dist(rng);
    b.tokens.reserve(static_cast<size_t>(len));
    for (int t = 0; t < len; ++t) {
      if (ud(rng) < gendered_token_rate) {
        int p;
        if (!occ_pairs[static_cast<size_t>(occ)].empty() && ud(rng) < occ_pair_prob) {
          const auto& cand = occ_pairs[static_cast<size_t>(occ)];
          p = cand[static_cast<size_t>(rng() % cand.size())];
        } else {
          p = pair_dist(rng);
        }
        bool female_side = ud(rng) < gender_match_prob ? b.gender == 1 : b.gender != 1;
        b.tokens.push_back((female_side ? "herword" : "hisword") + std::to_string(p));
      } else if (ud(rng) < topic_token_rate) {
        int src = occ;
        if (ud(rng) < twin_confusion) {
          int twin = occ % 2 == 0 ? occ + 1 : occ - 1;
          if (twin < C) src = twin;
        }
        const auto& tw = topic_word_idx[static_cast<size_t>(src)];
        b.tokens.push_back(words[static_cast<size_t>(tw[rng() % tw.size()])]);
      } else {
        const std::vector<int>* pool = &filler_all;
        if (ud(rng) < filler_tilt) {
          pool = b.gender == 1 ? &filler_pos : &filler_neg;
        }
        b.tokens.push_back(words[static_cast<size_t>((*pool)[rng() % pool->size()])]);
      }
    }
    out.bios.push_back(std::move(b));
  }
  assign_splits(out.bios, spec.seed);
  return out;
}

}  // namespace embfair
