#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "embfair/data.hpp"
#include "embfair/errors.hpp"
#include "embfair/gender_geometry.hpp"

using namespace embfair;

namespace {

EmbeddingSet make_set(const std::vector<std::pair<std::string, Eigen::RowVectorXd>>& entries) {
  EmbeddingSet e;
  e.dim = static_cast<int>(entries.front().second.size());
  for (const auto& [w, v] : entries) {
    e.index.emplace(w, e.size());
    e.words.push_back(w);
  }
  e.matrix.resize(static_cast<Eigen::Index>(entries.size()), e.dim);
  for (size_t i = 0; i < entries.size(); ++i) e.matrix.row(static_cast<Eigen::Index>(i)) = entries[i].second;
  return e;
}

Eigen::RowVectorXd rv(std::initializer_list<double> xs) {
  Eigen::RowVectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Independent oracle: explicitly assemble the d x d scatter matrix
// 1/2 sum_i sum_{w in D_i} (w - mu_i)^T (w - mu_i) and take the dominant
// eigenvector by dense symmetric eigendecomposition.
Eigen::VectorXd scatter_oracle_direction(const EmbeddingSet& e, const WordPairList& pairs) {
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(e.dim, e.dim);
  for (const auto& [a, b] : pairs.pairs) {
    int ia = e.row(a), ib = e.row(b);
    if (ia < 0 || ib < 0) continue;
    Eigen::RowVectorXd va = e.matrix.row(ia), vb = e.matrix.row(ib);
    Eigen::RowVectorXd mu = 0.5 * (va + vb);
    scatter += 0.5 * ((va - mu).transpose() * (va - mu) + (vb - mu).transpose() * (vb - mu));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scatter);
  return es.eigenvectors().col(e.dim - 1);  // ascending order: last is dominant
}

}  // namespace

TEST_CASE("subspace from one symmetric pair, oriented female-positive") {
  auto e = make_set({{"he", rv({0.6, 0.8})}, {"she", rv({-0.6, 0.8})}});
  WordPairList pairs;
  pairs.pairs = {{"he", "she"}};
  auto B = compute_gender_subspace(e, pairs, 1);
  REQUIRE(B.k == 1);
  CHECK(std::abs(B.direction().norm() - 1.0) < 1e-8);
  // she - he = (-1.2, 0): orientation forces b = (-1, 0)
  CHECK(B.direction()(0) == doctest::Approx(-1.0));
  CHECK(B.direction()(1) == doctest::Approx(0.0));
}

TEST_CASE("identical pair vectors give no usable scatter") {
  auto e = make_set({{"a", rv({0.6, 0.8})}, {"b", rv({0.6, 0.8})}});
  WordPairList pairs;
  pairs.pairs = {{"a", "b"}};
  CHECK_THROWS_AS(compute_gender_subspace(e, pairs, 1), DataError);
}

TEST_CASE("all pairs OOV errors; dropped pairs counted") {
  auto e = make_set({{"he", rv({0.6, 0.8})}, {"she", rv({-0.6, 0.8})}});
  WordPairList pairs;
  pairs.pairs = {{"x", "y"}};
  CHECK_THROWS_AS(compute_gender_subspace(e, pairs, 1), DataError);
  pairs.pairs = {{"he", "she"}, {"x", "y"}};
  int dropped = 0;
  compute_gender_subspace(e, pairs, 1, &dropped);
  CHECK(dropped == 1);
}

TEST_CASE("k beyond the nonzero spectrum errors") {
  auto e = make_set({{"he", rv({0.6, 0.8, 0.0})}, {"she", rv({-0.6, 0.8, 0.0})}});
  WordPairList pairs;
  pairs.pairs = {{"he", "she"}};
  CHECK_THROWS_AS(compute_gender_subspace(e, pairs, 2), DataError);
  CHECK_THROWS_AS(compute_gender_subspace(e, pairs, 5), ConfigError);  // k > d
}

TEST_CASE("subspace matches brute-force eigendecomposition oracle") {
  std::mt19937_64 rng(20240801);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<int> dim_dist(2, 10);
  std::uniform_int_distribution<int> pair_dist(1, 20);
  for (int trial = 0; trial < 100; ++trial) {
    int d = dim_dist(rng);
    int n = pair_dist(rng);
    std::vector<std::pair<std::string, Eigen::RowVectorXd>> entries;
    WordPairList pairs;
    for (int i = 0; i < n; ++i) {
      Eigen::RowVectorXd a(d), b(d);
      for (int j = 0; j < d; ++j) {
        a(j) = nd(rng);
        b(j) = nd(rng);
      }
      a.normalize();
      b.normalize();
      std::string wa = "m" + std::to_string(i), wb = "f" + std::to_string(i);
      entries.emplace_back(wa, a);
      entries.emplace_back(wb, b);
      pairs.pairs.emplace_back(wa, wb);
    }
    auto e = make_set(entries);
    auto B = compute_gender_subspace(e, pairs, 1);
    Eigen::VectorXd oracle = scatter_oracle_direction(e, pairs);
    if (oracle.dot(B.direction().transpose()) < 0) oracle = -oracle;
    CHECK((oracle.transpose() - B.direction()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("pair order swap flips nothing after orientation") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<std::pair<std::string, Eigen::RowVectorXd>> entries;
  WordPairList pairs, swapped;
  for (int i = 0; i < 6; ++i) {
    Eigen::RowVectorXd a(5), b(5);
    for (int j = 0; j < 5; ++j) {
      a(j) = nd(rng);
      b(j) = nd(rng);
    }
    std::string wa = "m" + std::to_string(i), wb = "f" + std::to_string(i);
    entries.emplace_back(wa, a);
    entries.emplace_back(wb, b);
    pairs.pairs.emplace_back(wa, wb);
    swapped.pairs.emplace_back(wb, wa);
  }
  auto e = make_set(entries);
  auto B1 = compute_gender_subspace(e, pairs, 1);
  auto B2 = compute_gender_subspace(e, swapped, 1);
  CHECK((B1.direction() + B2.direction()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("gender_component values") {
  auto e = make_set({{"w", rv({0.6, 0.8})}, {"b", rv({-1.0, 0.0})}, {"orth", rv({0.0, 1.0})}});
  GenderSubspace B;
  B.k = 1;
  B.basis = rv({-1.0, 0.0});
  CHECK(gender_component(e, "orth", B) == doctest::Approx(0.0));
  CHECK(gender_component(e, "b", B) == doctest::Approx(1.0));
  CHECK(gender_component(e, "w", B) == doctest::Approx(-0.6));
  CHECK_THROWS_AS(gender_component(e, "missing", B), DataError);
}

TEST_CASE("gender_component is linear in the word vector") {
  auto e = make_set({{"w", rv({0.6, 0.8})}, {"w2", rv({1.8, 2.4})}});
  GenderSubspace B;
  B.k = 1;
  B.basis = rv({-1.0, 0.0});
  CHECK(gender_component(e, "w2", B) == doctest::Approx(3.0 * gender_component(e, "w", B)));
}

TEST_CASE("biography_gender_component") {
  auto e = make_set({{"he", rv({0.6, 0.8})}, {"nurse", rv({-0.1, 0.99})}, {"orth", rv({0.0, 1.0})}});
  GenderSubspace B;
  B.k = 1;
  B.basis = rv({-1.0, 0.0});
  GenderWordList gw;
  gw.words = {"he"};

  // single token: mean of one
  auto c1 = biography_gender_component(e, {"he"}, B, TokenFilter::all, gw);
  REQUIRE(c1);
  CHECK(*c1 == doctest::Approx(-0.6));

  // he: -0.6, nurse: +0.1 -> mean -0.25
  auto c2 = biography_gender_component(e, {"he", "nurse"}, B, TokenFilter::all, gw);
  REQUIRE(c2);
  CHECK(*c2 == doctest::Approx(-0.25));

  auto c3 = biography_gender_component(e, {"orth", "orth"}, B, TokenFilter::all, gw);
  CHECK(*c3 == doctest::Approx(0.0));

  // empty selection
  CHECK(!biography_gender_component(e, {"oov"}, B, TokenFilter::all, gw));
  CHECK(!biography_gender_component(e, {"nurse"}, B, TokenFilter::gender_specific_only, gw));

  // occurrence weighting: all == count-weighted combination of the split variants
  auto all = biography_gender_component(e, {"he", "he", "nurse"}, B, TokenFilter::all, gw);
  auto gen = biography_gender_component(e, {"he", "he", "nurse"}, B, TokenFilter::gender_specific_only, gw);
  auto neu = biography_gender_component(e, {"he", "he", "nurse"}, B, TokenFilter::neutral_only, gw);
  CHECK(*all == doctest::Approx((2.0 * *gen + 1.0 * *neu) / 3.0));
}

TEST_CASE("gender_component_distribution hand case") {
  auto e = make_set({{"a", rv({0.2, 0.98})}, {"b", rv({0.1, 0.99})}});
  GenderSubspace B;
  B.k = 1;
  B.basis = rv({-1.0, 0.0});
  GenderWordList gw;
  gw.words = {"nonexistent"};
  std::vector<Biography> bios(2);
  bios[0].id = "m1";
  bios[0].tokens = {"a"};
  bios[0].gender = 0;
  bios[1].id = "f1";
  bios[1].tokens = {"b"};
  bios[1].gender = 1;
  auto s = gender_component_distribution(e, bios, B, TokenFilter::all, gw, 2);
  CHECK(s.mean_male == doctest::Approx(-0.2));
  CHECK(s.mean_female == doctest::Approx(-0.1));
  REQUIRE(s.bins.size() == 2);
  CHECK(s.bins[0].count_male == 1);
  CHECK(s.bins[1].count_female == 1);
  CHECK(s.bins[0].count_female == 0);
  long total_f = 0, total_m = 0;
  for (const auto& b : s.bins) {
    total_f += b.count_female;
    total_m += b.count_male;
  }
  CHECK(total_f == s.n_female);
  CHECK(total_m == s.n_male);
}

TEST_CASE("gender_component_distribution single-gender dataset") {
  auto e = make_set({{"a", rv({0.2, 0.98})}});
  GenderSubspace B;
  B.k = 1;
  B.basis = rv({-1.0, 0.0});
  GenderWordList gw;
  gw.words = {"x"};
  std::vector<Biography> bios(1);
  bios[0].id = "m1";
  bios[0].tokens = {"a"};
  bios[0].gender = 0;
  auto s = gender_component_distribution(e, bios, B, TokenFilter::all, gw, 3);
  CHECK(std::isnan(s.mean_female));
  CHECK(s.n_female == 0);
  CHECK(s.mean_male == doctest::Approx(-0.2));
}
