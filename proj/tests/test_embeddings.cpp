#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "embfair/embeddings.hpp"
#include "embfair/errors.hpp"

using namespace embfair;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("embfair_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) {
    auto p = path / name;
    std::ofstream(p) << content;
    return p.string();
  }
};

}  // namespace

TEST_CASE("load_embeddings parses a single line") {
  TempDir tmp;
  auto e = load_embeddings(tmp.file("e.txt", "he 0.6 0.8\n"), 2);
  CHECK(e.size() == 1);
  CHECK(e.dim == 2);
  CHECK(e.row("he") == 0);
  CHECK(e.matrix(0, 0) == doctest::Approx(0.6));
  CHECK(e.matrix(0, 1) == doctest::Approx(0.8));
}

TEST_CASE("load_embeddings empty file gives empty set") {
  TempDir tmp;
  auto e = load_embeddings(tmp.file("e.txt", ""), 100);
  CHECK(e.size() == 0);
}

TEST_CASE("load_embeddings dimension mismatch names the line") {
  TempDir tmp;
  auto path = tmp.file("e.txt", "a 1 2\nb 3 4\nc 5\n");
  try {
    load_embeddings(path, 2);
    FAIL("expected DataError");
  } catch (const DataError& ex) {
    CHECK(std::string(ex.what()).find(":3") != std::string::npos);
  }
}

TEST_CASE("load_embeddings rejects unparseable floats") {
  TempDir tmp;
  CHECK_THROWS_AS(load_embeddings(tmp.file("e.txt", "a 1.0 oops\n"), 2), DataError);
}

TEST_CASE("load_embeddings keeps first duplicate and counts") {
  TempDir tmp;
  LoadReport rep;
  auto e = load_embeddings(tmp.file("e.txt", "he 1 0\nhe 0 1\n"), 2, &rep);
  CHECK(e.size() == 1);
  CHECK(rep.duplicate_words == 1);
  CHECK(e.matrix(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("load_embeddings tolerates a word2vec header line") {
  TempDir tmp;
  auto e = load_embeddings(tmp.file("e.txt", "2 2\nhe 1 0\nshe 0 1\n"), 2);
  CHECK(e.size() == 2);
}

TEST_CASE("load_embeddings lowercases tokens") {
  TempDir tmp;
  auto e = load_embeddings(tmp.file("e.txt", "He 1 0\n"), 2);
  CHECK(e.contains("he"));
  CHECK(!e.contains("He"));
}

TEST_CASE("normalize_rows") {
  EmbeddingSet e;
  e.dim = 2;
  e.words = {"a", "b", "c"};
  e.index = {{"a", 0}, {"b", 1}, {"c", 2}};
  e.matrix.resize(3, 2);
  e.matrix << 3, 4, 0, 0, 0.6, 0.8;
  int zeros = 0;
  auto n = normalize_rows(e, &zeros);
  CHECK(n.matrix(0, 0) == doctest::Approx(0.6));
  CHECK(n.matrix(0, 1) == doctest::Approx(0.8));
  CHECK(n.matrix(1, 0) == 0.0);
  CHECK(zeros == 1);
  // idempotence
  auto n2 = normalize_rows(n);
  CHECK((n2.matrix - n.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("load_word_pairs") {
  TempDir tmp;
  auto p = load_word_pairs(tmp.file("p.json", R"([["he","she"],["mr.","mrs."]])"), PairRole::defining);
  CHECK(p.pairs.size() == 2);
  CHECK(p.pairs[0].first == "he");
  CHECK(p.pairs[1].second == "mrs.");

  auto empty = load_word_pairs(tmp.file("q.json", "[]"), PairRole::equalize);
  CHECK(empty.pairs.empty());

  try {
    load_word_pairs(tmp.file("bad.json", R"([["he"]])"), PairRole::defining);
    FAIL("expected DataError");
  } catch (const DataError& ex) {
    CHECK(std::string(ex.what()).find("index 0") != std::string::npos);
  }
  CHECK_THROWS_AS(load_word_pairs(tmp.file("nj.json", "not json"), PairRole::defining), DataError);
}

TEST_CASE("save/load round trip preserves values and order") {
  TempDir tmp;
  EmbeddingSet e;
  e.dim = 3;
  e.words = {"zeta", "alpha", "mid"};
  e.index = {{"zeta", 0}, {"alpha", 1}, {"mid", 2}};
  e.matrix.resize(3, 3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ud(-2.0, 2.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) e.matrix(i, j) = ud(rng);
  }
  auto path = (tmp.path / "round.txt").string();
  save_embeddings(e, path);
  auto back = load_embeddings(path, 3);
  REQUIRE(back.size() == 3);
  CHECK(back.words == e.words);
  CHECK((back.matrix - e.matrix).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("save_embeddings to unwritable path errors") {
  EmbeddingSet e;
  e.dim = 1;
  CHECK_THROWS_AS(save_embeddings(e, "/nonexistent_dir_xyz/out.txt"), DataError);
}

TEST_CASE("gender word list loads lowercase and rejects empty") {
  TempDir tmp;
  auto gw = load_gender_words(tmp.file("g.json", R"(["He","she"])"));
  CHECK(gw.contains("he"));
  CHECK(gw.contains("she"));
  CHECK_THROWS_AS(load_gender_words(tmp.file("e.json", "[]")), DataError);
}
