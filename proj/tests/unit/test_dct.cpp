#include <doctest.h>

#include <random>

#include "dopclust/dct.hpp"
#include "oracles.hpp"

using namespace dopclust;

TEST_CASE("dct2 of a constant block keeps only the DC term") {
  const Matrix f = dct2(Matrix::Ones(2, 2));
  CHECK(f(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(f(0, 1)) < 1e-14);
  CHECK(std::abs(f(1, 0)) < 1e-14);
  CHECK(std::abs(f(1, 1)) < 1e-14);
}

TEST_CASE("dct2 matches direct summation") {
  std::mt19937_64 g(11);
  for (auto [u, v] : {std::pair{4, 4}, {1, 5}, {7, 3}, {13, 14}}) {
    const Matrix block = oracle::random_matrix(g, u, v);
    CHECK((dct2(block) - oracle::naive_dct2(block)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("dct2 is linear, orthonormal and invertible") {
  std::mt19937_64 g(12);
  const Matrix a = oracle::random_matrix(g, 8, 8);
  const Matrix b = oracle::random_matrix(g, 8, 8);
  CHECK((dct2(a + b) - dct2(a) - dct2(b)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(a.squaredNorm() - dct2(a).squaredNorm()) < 1e-8);
  CHECK((idct2(dct2(a)) - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(dct2(Matrix(0, 3)), InvalidArgument);
}

TEST_CASE("zig-zag order") {
  Matrix m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  Vector expected(6);
  expected << 1, 2, 4, 7, 5, 3;
  CHECK(zigzag_select(m, 6) == expected);

  const Vector all = zigzag_select(m, 9);
  std::vector<double> sorted(all.data(), all.data() + all.size());
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});

  CHECK(zigzag_select(Matrix::Constant(1, 1, 4.0), 1)[0] == 4.0);
  CHECK_THROWS_AS(zigzag_select(m, 10), InvalidArgument);

  const auto order = zigzag_order(2, 3);
  CHECK(order == std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("split_thirds covers the length") {
  CHECK(split_thirds(40) == std::array<int, 4>{0, 13, 26, 40});
  CHECK(split_thirds(10) == std::array<int, 4>{0, 3, 6, 10});
  CHECK(split_thirds(80) == std::array<int, 4>{0, 26, 52, 80});
  CHECK_THROWS_AS(split_thirds(2), InvalidArgument);
}
