#include <doctest.h>

#include <random>

#include "dopclust/pca.hpp"
#include "oracles.hpp"

using namespace dopclust;

namespace {

void check_orthonormal(const Matrix& w) {
  const Matrix gram = w.transpose() * w;
  CHECK((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-8);
}

}  // namespace

TEST_CASE("rank-one data needs one component") {
  Matrix x(100, 2);
  for (int i = 0; i < 100; ++i) x.row(i) << i * 0.1, i * 0.1;
  const PcaModel m = pca_fit(x);
  CHECK(m.components() == 1);
  CHECK(m.explained_variance_ratio[0] == doctest::Approx(1.0));
}

TEST_CASE("keeping every component reconstructs the data") {
  std::mt19937_64 g(31);
  const Matrix x = oracle::random_matrix(g, 20, 5);
  const PcaModel m = pca_fit(x, 1.0);
  CHECK(m.components() == 5);
  check_orthonormal(m.basis);
  const Matrix z = pca_transform(m, x);
  const Matrix back = (z * m.basis.transpose()).rowwise() + m.mean.transpose();
  CHECK((back - x).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(z.colwise().mean().cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("covariance eigenvalues match a Jacobi oracle") {
  std::mt19937_64 g(32);
  const Matrix x = oracle::random_matrix(g, 50, 10);
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const auto expected = oracle::jacobi_eigenvalues(centered.transpose() * centered / 49.0);
  const Vector spectrum = covariance_spectrum(x);
  REQUIRE(spectrum.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(spectrum[i] - expected[i]) <= 1e-6);

  const PcaModel m = pca_fit(x, 0.95);
  for (Eigen::Index i = 0; i < m.components(); ++i) CHECK(std::abs(m.explained_variance[i] - expected[i]) <= 1e-6);
}

TEST_CASE("component count is minimal for the variance target") {
  std::mt19937_64 g(33);
  Matrix x = oracle::random_matrix(g, 60, 8);
  x.col(0) *= 10.0;
  x.col(1) *= 5.0;
  const PcaModel m = pca_fit(x, 0.95);
  check_orthonormal(m.basis);
  const double total = m.explained_variance_ratio.sum();
  CHECK(total >= 0.95 - 1e-12);
  CHECK(total - m.explained_variance_ratio[m.components() - 1] < 0.95);
}

TEST_CASE("pca rejects zero variance") {
  CHECK_THROWS_AS(pca_fit(Matrix::Ones(5, 3)), NumericalError);
  CHECK_THROWS_AS(pca_fit(Matrix::Ones(1, 3)), InvalidArgument);
}

TEST_CASE("image covariance equals the naive triple loop") {
  std::mt19937_64 g(34);
  std::vector<Matrix> images;
  for (int i = 0; i < 5; ++i) images.push_back(oracle::random_matrix(g, 8, 8));
  Matrix mean = Matrix::Zero(8, 8);
  for (const auto& a : images) mean += a / 5.0;
  CHECK((pca2d_covariance(images, mean) - oracle::image_covariance(images, mean)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("2DPCA on a rank-one family") {
  std::mt19937_64 g(35);
  const Matrix base = oracle::random_matrix(g, 80, 80, 0.0, 1.0);
  const Matrix u = oracle::random_matrix(g, 80, 1);
  const Matrix v = oracle::random_matrix(g, 80, 1);
  const std::vector<double> c = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  std::vector<Matrix> images;
  for (double ci : c) images.push_back(base + ci * u * v.transpose());
  const Pca2dModel m = pca2d_fit(images);
  CHECK(m.components() == 1);
  check_orthonormal(m.basis);

  const Vector f0 = pca2d_transform(m, images[0]);
  CHECK(f0.size() == 80);
  for (std::size_t i = 1; i < images.size(); ++i) {
    const Vector fi = pca2d_transform(m, images[i]);
    CHECK((fi - f0 * (c[i] / c[0])).cwiseAbs().maxCoeff() <= 1e-6);
  }

  CHECK_THROWS_AS(pca2d_fit({base, base, base}), NumericalError);
}

TEST_CASE("2DPCA features are flattened component-major") {
  std::mt19937_64 g(36);
  std::vector<Matrix> images;
  for (int i = 0; i < 6; ++i) images.push_back(oracle::random_matrix(g, 80, 80, 0.0, 1.0));
  const Pca2dModel m = pca2d_fit(images, 0.5);
  REQUIRE(m.components() >= 2);
  const Matrix y = pca2d_project(m, images[0]);
  const Vector f = pca2d_transform(m, images[0]);
  CHECK(f.head(80) == y.col(0));
  CHECK(f.segment(80, 80) == y.col(1));
}
