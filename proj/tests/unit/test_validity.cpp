#include <doctest.h>

#include <random>

#include "dopclust/validity.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace dopclust;

namespace {

Matrix line(std::initializer_list<double> xs) {
  Matrix z(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) z(i++, 0) = x;
  return z;
}

}  // namespace

TEST_CASE("distortion") {
  CHECK(distortion(line({1, 2}), {0, 1}, line({1, 2})) == 0.0);
  CHECK(distortion(line({0, 1, 10, 11}), {0, 0, 1, 1}, line({0.5, 10.5})) == doctest::Approx(0.25));
  CHECK(distortion(line({0, 2}), {0, 0}, line({1})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(distortion(line({0, 2}), {0, 1}, line({1})), InvalidArgument);
}

TEST_CASE("silhouette") {
  CHECK(silhouette(line({0, 0.001, 100, 100.001}), {0, 0, 1, 1}) > 0.99);
  CHECK_THROWS_AS(silhouette(line({0, 1}), {0, 0}), InvalidArgument);

  std::mt19937_64 g(61);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix z(100, 2);
    Labels labels(100);
    for (int i = 0; i < 100; ++i) {
      z.row(i) << normal(g), normal(g);
      labels[i] = i < 2 ? i : coin(g);
    }
    CHECK(std::abs(silhouette(z, labels)) < 0.2);
  }

  for (int trial = 0; trial < 30; ++trial) {
    const Matrix z = oracle::random_matrix(g, 6, 2);
    Labels labels = {0, 1, 2, std::uniform_int_distribution<int>(0, 2)(g), 1, 0};
    const double s = silhouette(z, labels);
    CHECK(std::abs(s - oracle::silhouette(z, labels)) <= 1e-12);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("Davies-Bouldin") {
  CHECK(davies_bouldin(line({0, 10}), {0, 1}, line({0, 10})) == 0.0);
  CHECK(davies_bouldin(line({0, 1, 10, 11}), {0, 0, 1, 1}, line({0.5, 10.5})) == doctest::Approx(0.01));
  try {
    davies_bouldin(line({0, 1, 2}), {0, 1, 2}, line({0, 1, 1}));
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("1 and 2") != std::string::npos);
  }
  std::mt19937_64 g(62);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix z = oracle::random_matrix(g, 9, 3);
    const Labels labels = {0, 1, 2, 0, 1, 2, 0, 1, 2};
    const Matrix c = oracle::centroids(z, labels);
    CHECK(std::abs(davies_bouldin(z, labels, c) - oracle::davies_bouldin(z, labels, c)) <= 1e-12 * std::max(1.0, oracle::davies_bouldin(z, labels, c)));
  }
}

TEST_CASE("Dunn") {
  CHECK(dunn(line({0, 1, 10, 11}), {0, 0, 1, 1}, line({0.5, 10.5})) == doctest::Approx(200.0));
  // Halving the spread (deviations scaled by 1/sqrt 2) doubles the index.
  const double s = std::sqrt(0.5);
  CHECK(dunn(line({0.5 - 0.5 * s, 0.5 + 0.5 * s, 10.5 - 0.5 * s, 10.5 + 0.5 * s}), {0, 0, 1, 1}, line({0.5, 10.5})) ==
        doctest::Approx(400.0));
  CHECK_THROWS_AS(dunn(line({0, 10}), {0, 1}, line({0, 10})), NumericalError);

  std::mt19937_64 g(63);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix z = oracle::random_matrix(g, 8, 2);
    const Labels labels = {0, 1, 0, 1, 0, 1, 1, 0};
    const Matrix c = oracle::centroids(z, labels);
    const double d = dunn(z, labels, c);
    CHECK(std::abs(d - oracle::dunn(z, labels, c)) <= 1e-12 * std::max(1.0, d));

    const Matrix moved = z.array() + 3.5;
    const Matrix moved_c = c.array() + 3.5;
    CHECK(std::abs(dunn(moved, labels, moved_c) - d) <= 1e-9 * d);
    CHECK(std::abs(dunn(z * 7.0, labels, c * 7.0) - d) <= 1e-9 * d);
    CHECK(std::abs(davies_bouldin(z * 7.0, labels, c * 7.0) - davies_bouldin(z, labels, c)) <=
          1e-9 * davies_bouldin(z, labels, c));
  }
}

TEST_CASE("spread mode switch") {
  const auto sum = cluster_spreads(line({0, 1, 10, 11, 12}), {0, 0, 1, 1, 1}, line({0.5, 11}));
  const auto mean = cluster_spreads(line({0, 1, 10, 11, 12}), {0, 0, 1, 1, 1}, line({0.5, 11}), SpreadMode::mean);
  CHECK(sum[0] == doctest::Approx(0.5));
  CHECK(sum[1] == doctest::Approx(2.0));
  CHECK(mean[0] == doctest::Approx(0.25));
  CHECK(mean[1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("K sweep on blobs") {
  const std::vector<int> ks = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  ClustererConfig config;
  config.seed = 4;
  const auto five = sweep_k(gen::blobs(5, 30, 0.1, 10.0, 71).points, ks, config);
  CHECK(five.vote_silhouette == 5);
  CHECK(five.vote_davies_bouldin == 5);
  CHECK(five.vote_dunn == 5);
  CHECK(five.recommended_k == 5);
  CHECK(five.distortion.size() == ks.size());
  CHECK(five.silhouette.size() == ks.size());
  CHECK(five.davies_bouldin.size() == ks.size());
  CHECK(five.dunn.size() == ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    CHECK(five.silhouette[i] >= -1.0);
    CHECK(five.silhouette[i] <= 1.0);
    CHECK(five.distortion[i] >= 0.0);
    CHECK(five.inverse_davies_bouldin[i] == doctest::Approx(1.0 / five.davies_bouldin[i]));
    if (i > 0) CHECK(five.distortion[i] <= five.distortion[i - 1] + 1e-9);
  }

  CHECK(sweep_k(gen::blobs(2, 30, 0.1, 10.0, 72).points, ks, config).recommended_k == 2);

  const auto single = sweep_k(gen::blobs(3, 10, 0.1, 10.0, 73).points, {3}, config);
  CHECK(single.candidate_ks == std::vector<int>{3});
  CHECK(single.recommended_k == 3);
  const std::string csv = ksweep_to_csv(single);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.rfind("k,distortion,silhouette,davies_bouldin,inverse_davies_bouldin,dunn\n", 0) == 0);
  CHECK(ksweep_to_json(single).find("\"recommended_k\"") != std::string::npos);

  CHECK_THROWS_AS(sweep_k(gen::blobs(2, 2, 0.1, 10.0, 74).points, {5}, config), InvalidArgument);
}
