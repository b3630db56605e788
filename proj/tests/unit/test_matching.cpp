#include <doctest.h>

#include <numeric>
#include <random>

#include "dopclust/matching.hpp"
#include "oracles.hpp"

using namespace dopclust;

TEST_CASE("identity and permuted labels") {
  const Labels truth = {0, 1, 2, 3, 0, 1, 2, 3, 3};
  CHECK(match_labels(truth, truth, 4) == std::vector<int>{0, 1, 2, 3});
  CHECK(accuracy_and_confusion(truth, truth, {0, 1, 2, 3}).accuracy == 1.0);

  const std::vector<int> sigma = {2, 0, 3, 1};
  Labels pred;
  for (int t : truth) pred.push_back(sigma[t]);
  const auto mapping = match_labels(pred, truth, 4);
  for (int c = 0; c < 4; ++c) CHECK(mapping[sigma[c]] == c);
  const auto result = accuracy_and_confusion(pred, truth, mapping);
  CHECK(result.accuracy == 1.0);
  CHECK(result.confusion == CountMatrix(result.confusion.diagonal().asDiagonal()));
}

TEST_CASE("matching agrees with exhaustive search") {
  std::mt19937_64 g(81);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = trial < 100 ? 4 : 1 + trial % 8;
    const int n = trial < 100 ? 30 : 5 + trial % 40;
    Labels pred(n), truth(n);
    for (int i = 0; i < n; ++i) {
      pred[i] = std::uniform_int_distribution<int>(0, k - 1)(g);
      truth[i] = std::uniform_int_distribution<int>(0, k - 1)(g);
    }
    const auto expected = oracle::best_permutation(pred, truth, k);
    CHECK(match_labels(pred, truth, k) == expected);
    const CountMatrix counts = contingency(pred, truth, k);
    CHECK(best_permutation_exhaustive(counts) == expected);
    CHECK(best_permutation_assignment(counts) == expected);
  }
}

TEST_CASE("assignment solver above the exhaustive limit") {
  std::mt19937_64 g(82);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 9 + trial % 8;
    CountMatrix counts(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) counts(i, j) = std::uniform_int_distribution<int>(0, 4)(g);
    const auto perm = best_permutation_assignment(counts);
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    CHECK(sorted == ids);
    long long value = 0;
    for (int c = 0; c < k; ++c) value += counts(c, perm[c]);
    CHECK(value == max_assignment_value(counts));
  }
  CHECK_THROWS_AS(match_labels({0}, {0}, 21), InvalidArgument);
  CHECK_NOTHROW(match_labels({0}, {0}, 21, 30));
}

TEST_CASE("accuracy and confusion") {
  const Labels truth = {0, 0, 1, 1, 2, 2, 3, 3, 4, 4};
  const Labels one(10, 0);
  CHECK(accuracy_and_confusion(one, truth, match_labels(one, truth, 5)).accuracy == doctest::Approx(0.2));

  // Hand count: class 0 -> {0,0,1}, class 1 -> {1,1}, class 2 -> {2,0}.
  const Labels t3 = {0, 0, 0, 1, 1, 2, 2};
  const Labels p3 = {0, 0, 1, 1, 1, 2, 0};
  const auto r = accuracy_and_confusion(p3, t3, {0, 1, 2});
  CountMatrix expected(3, 3);
  expected << 2, 1, 0, 0, 2, 0, 1, 0, 1;
  CHECK(r.confusion == expected);
  CHECK(r.accuracy == doctest::Approx(5.0 / 7.0));
  CHECK(r.confusion.sum() == 7);

  CHECK_THROWS_AS(accuracy_and_confusion(p3, t3, {0, 0, 2}), InvalidArgument);
  CHECK_THROWS_AS(contingency({0, 5}, {0, 1}, 2), InvalidArgument);
}
