#include "embfair/embeddings.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "embfair/errors.hpp"

namespace embfair {

std::string lowercase(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

namespace {

bool looks_like_header(const std::string& line) {
  std::istringstream ss(line);
  long a = 0, b = 0;
  std::string rest;
  if (!(ss >> a >> b)) return false;
  if (ss >> rest) return false;
  return a > 0 && b > 0;
}

double parse_float(const std::string& tok, const std::string& path, int lineno) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw DataError(path + ":" + std::to_string(lineno) + ": unparseable float '" + tok + "'");
  }
  return v;
}

}  // namespace

EmbeddingSet load_embeddings(const std::string& path, int expected_dim,
                             LoadReport* report) {
  if (expected_dim <= 0) throw ConfigError("expected_dim must be positive");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);

  EmbeddingSet e;
  e.dim = expected_dim;
  std::vector<std::vector<double>> rows;
  LoadReport rep;

  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (first && looks_like_header(line)) {
      first = false;
      continue;
    }
    first = false;

    std::istringstream ss(line);
    std::string word;
    ss >> word;
    word = lowercase(word);

    std::vector<double> vec;
    vec.reserve(expected_dim);
    std::string tok;
    while (ss >> tok) vec.push_back(parse_float(tok, path, lineno));
    if (static_cast<int>(vec.size()) != expected_dim) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(expected_dim) + " floats, got " +
                      std::to_string(vec.size()));
    }
    if (e.index.count(word)) {
      ++rep.duplicate_words;
      continue;
    }
    e.index.emplace(word, static_cast<int>(rows.size()));
    e.words.push_back(word);
    rows.push_back(std::move(vec));
  }

  e.matrix.resize(static_cast<Eigen::Index>(rows.size()), expected_dim);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < expected_dim; ++j) e.matrix(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  if (report) *report = rep;
  return e;
}

EmbeddingSet normalize_rows(const EmbeddingSet& e, int* zero_rows) {
  EmbeddingSet out = e;
  int zeros = 0;
  for (Eigen::Index i = 0; i < out.matrix.rows(); ++i) {
    double n = out.matrix.row(i).norm();
    if (n > 0.0) {
      out.matrix.row(i) /= n;
    } else {
      ++zeros;
    }
  }
  if (zero_rows) *zero_rows = zeros;
  return out;
}

WordPairList load_word_pairs(const std::string& path, PairRole role) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pair list: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(path + ": malformed JSON: " + ex.what());
  }
  if (!j.is_array()) throw DataError(path + ": expected a JSON array");

  WordPairList out;
  out.role = role;
  for (size_t i = 0; i < j.size(); ++i) {
    const auto& el = j[i];
    if (!el.is_array() || el.size() != 2 || !el[0].is_string() || !el[1].is_string()) {
      throw DataError(path + ": element at index " + std::to_string(i) +
                      " is not a 2-element string array");
    }
    std::string a = lowercase(el[0].get<std::string>());
    std::string b = lowercase(el[1].get<std::string>());
    if (a == b) {
      throw DataError(path + ": pair at index " + std::to_string(i) +
                      " contains the same word twice ('" + a + "')");
    }
    out.pairs.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

GenderWordList load_gender_words(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open gender word list: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(path + ": malformed JSON: " + ex.what());
  }
  if (!j.is_array()) throw DataError(path + ": expected a JSON array");
  GenderWordList out;
  for (const auto& el : j) {
    if (!el.is_string()) throw DataError(path + ": expected an array of strings");
    out.words.insert(lowercase(el.get<std::string>()));
  }
  if (out.words.empty()) throw DataError(path + ": gender word list is empty");
  return out;
}

void save_embeddings(const EmbeddingSet& e, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  char buf[64];
  for (int i = 0; i < e.size(); ++i) {
    out << e.words[i];
    for (int j = 0; j < e.dim; ++j) {
      std::snprintf(buf, sizeof(buf), " %.6f", e.matrix(i, j));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

void save_word_pairs(const WordPairList& pairs, const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [a, b] : pairs.pairs) j.push_back({a, b});
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(1) << '\n';
}

void save_gender_words(const GenderWordList& gw, const std::string& path) {
  std::vector<std::string> sorted(gw.words.begin(), gw.words.end());
  std::sort(sorted.begin(), sorted.end());
  nlohmann::json j = sorted;
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(1) << '\n';
}

}  // namespace embfair
