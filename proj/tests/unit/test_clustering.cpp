#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "dopclust/clustering.hpp"
#include "oracles.hpp"

using namespace dopclust;

namespace {

Matrix line(std::initializer_list<double> xs) {
  Matrix z(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) z(i++, 0) = x;
  return z;
}

void check_monotone(const ClusterModel& m) {
  for (std::size_t t = 1; t < m.objective_trace.size(); ++t) {
    CHECK(m.objective_trace[t] <= m.objective_trace[t - 1] + 1e-12);
  }
}

}  // namespace

TEST_CASE("kmeans on four points") {
  const Matrix z = line({0, 1, 10, 11});
  const ClusterModel m = kmeans_fit(z, 2, 1);
  std::vector<double> centers = {m.centers(0, 0), m.centers(1, 0)};
  std::sort(centers.begin(), centers.end());
  CHECK(centers[0] == doctest::Approx(0.5));
  CHECK(centers[1] == doctest::Approx(10.5));
  CHECK(m.objective == doctest::Approx(1.0));
  CHECK(oracle::kmeans_optimum(z, 2) == doctest::Approx(1.0));
}

TEST_CASE("kmeans edge cases for K") {
  std::mt19937_64 g(51);
  const Matrix z = oracle::random_matrix(g, 7, 3);
  CHECK(kmeans_fit(z, 7, 2).objective == doctest::Approx(0.0));

  const ClusterModel one = kmeans_fit(z, 1, 3);
  CHECK((one.centers.row(0) - z.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(one.objective == doctest::Approx((z.rowwise() - z.colwise().mean()).squaredNorm()));

  CHECK_THROWS_AS(kmeans_fit(z, 8, 1), InvalidArgument);
  Matrix bad = z;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(kmeans_fit(bad, 2, 1), InvalidArgument);
  CHECK_THROWS_AS(kmedoids_fit(z, 0, 1), InvalidArgument);
}

TEST_CASE("kmedoids on four points breaks ties to the lower row") {
  const Matrix z = line({0, 1, 10, 11});
  CHECK(oracle::kmedoids_optimum(z, 2) == doctest::Approx(2.0));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ClusterModel m = kmedoids_fit(z, 2, seed);
    auto medoids = m.medoid_indices;
    std::sort(medoids.begin(), medoids.end());
    CHECK(medoids == std::vector<std::size_t>{0, 2});
    CHECK(m.objective == doctest::Approx(2.0));
  }
}

TEST_CASE("kmedoids degenerate inputs") {
  std::mt19937_64 g(52);
  const Matrix z = oracle::random_matrix(g, 6, 2);
  CHECK(kmedoids_fit(z, 6, 1).objective == doctest::Approx(0.0));

  const ClusterModel same = kmedoids_fit(Matrix::Constant(5, 3, 0.25), 2, 4);
  CHECK(same.objective == 0.0);
  REQUIRE(same.medoid_indices.size() == 2);
  CHECK(same.medoid_indices[0] != same.medoid_indices[1]);
}

TEST_CASE("model invariants on random data") {
  std::mt19937_64 g(53);
  for (int t = 0; t < 20; ++t) {
    const int n = 30 + t;
    const Matrix z = oracle::random_matrix(g, n, 3, -5, 5);
    const int k = 2 + t % 4;
    const ClusterModel a = kmeans_fit(z, k, static_cast<std::uint64_t>(t));
    const ClusterModel b = kmedoids_fit(z, k, static_cast<std::uint64_t>(t));
    check_monotone(a);
    check_monotone(b);
    CHECK(std::abs(assignment_cost(z, a.labels, a.centers) - a.objective) <= 1e-8);
    CHECK(std::abs(assignment_cost(z, b.labels, b.centers) - b.objective) <= 1e-8);
    CHECK(assign(a, z) == a.labels);
    CHECK(assign(b, z) == b.labels);

    for (int c = 0; c < k; ++c) {
      RowVector sum = RowVector::Zero(3);
      int count = 0;
      for (int i = 0; i < n; ++i)
        if (a.labels[i] == c) {
          sum += z.row(i);
          ++count;
        }
      REQUIRE(count > 0);
      CHECK((sum / count - a.centers.row(c)).cwiseAbs().maxCoeff() <= 1e-10);
    }
    for (int c = 0; c < k; ++c) CHECK(b.centers.row(c) == z.row(static_cast<Eigen::Index>(b.medoid_indices[c])));
  }
}

TEST_CASE("row permutation with mapped initialization gives the same partition") {
  std::mt19937_64 g(54);
  const Matrix z = oracle::random_matrix(g, 40, 2);
  std::vector<int> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), g);
  Matrix zp(40, 2);
  for (int i = 0; i < 40; ++i) zp.row(i) = z.row(perm[i]);
  const Matrix init = z.topRows(3);
  const ClusterModel a = kmeans_fit_from(z, init);
  const ClusterModel b = kmeans_fit_from(zp, init);
  for (int i = 0; i < 40; ++i) CHECK(b.labels[i] == a.labels[perm[i]]);
}

TEST_CASE("assignment tie rule and empty queries") {
  ClusterModel m;
  m.centers = line({-1, 5, 1});
  CHECK(assign(m, line({0})) == Labels{0});
  CHECK(assign(m, Matrix(0, 1)).empty());
  CHECK_THROWS_AS(assign(m, Matrix::Zero(2, 2)), InvalidArgument);
}

TEST_CASE("kmeans++ picks distinct rows") {
  const Matrix z = Matrix::Zero(6, 2);
  auto idx = kmeanspp_init(z, 4, 9);
  std::sort(idx.begin(), idx.end());
  CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
}

TEST_CASE("fit keeps the best restart and is deterministic") {
  std::mt19937_64 g(55);
  const Matrix z = oracle::random_matrix(g, 60, 2);
  ClustererConfig config;
  config.k = 4;
  config.seed = 77;
  config.n_init = 6;
  const ClusterModel best = fit(z, config);
  const ClusterModel again = fit(z, config);
  CHECK(best.labels == again.labels);
  CHECK(best.objective == again.objective);
  config.method = ClusterMethod::kmedoids;
  const ClusterModel med = fit(z, config);
  CHECK(med.medoid_indices.size() == 4);
}

TEST_CASE("cluster models round-trip through JSON") {
  std::mt19937_64 g(56);
  const Matrix z = oracle::random_matrix(g, 12, 2);
  const ClusterModel m = kmedoids_fit(z, 3, 5);
  const ClusterModel back = cluster_model_from_json(to_json(m));
  CHECK(back.method == m.method);
  CHECK(back.centers == m.centers);
  CHECK(back.medoid_indices == m.medoid_indices);
  CHECK(back.objective == m.objective);
  CHECK(back.seed == m.seed);
  CHECK(parse_cluster_method(to_string(ClusterMethod::kmeans)) == ClusterMethod::kmeans);
  CHECK_THROWS_AS(parse_cluster_method("dbscan"), InvalidArgument);
}
