#include <doctest.h>

#include <random>

#include "dopclust/manifold.hpp"
#include "oracles.hpp"

using namespace dopclust;

TEST_CASE("t-SNE affinities hit the target perplexity") {
  std::mt19937_64 g(91);
  const Matrix z = oracle::random_matrix(g, 40, 5);
  for (double perp : {5.0, 15.0, 30.0}) {
    const Matrix p = tsne_conditional_affinities(z, perp);
    const Vector h = row_entropies_bits(p);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      CHECK(p(i, i) == 0.0);
      CHECK(p.row(i).sum() == doctest::Approx(1.0));
      CHECK(std::abs(h(i) - std::log2(perp)) < 1e-5);
    }
    const Matrix joint = tsne_joint_affinities(p);
    CHECK((joint - joint.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(joint.sum() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(tsne_conditional_affinities(z, 40.0), InvalidArgument);
}

TEST_CASE("t-SNE embedding") {
  std::mt19937_64 g(92);
  Matrix z = oracle::random_matrix(g, 30, 4);
  z.bottomRows(15).array() += 10.0;
  TsneOptions options;
  options.perplexity = 5.0;
  options.iterations = 400;
  options.seed = 3;
  const Embedding e = tsne(z, options);
  CHECK(e.coords.rows() == 30);
  CHECK(e.coords.cols() == 2);
  CHECK(e.coords.allFinite());
  CHECK(e.final_loss >= 0.0);
  CHECK(e.loss_trace.back() < e.loss_trace.front());
  CHECK(tsne(z, options).coords == e.coords);

  const Embedding flat = tsne(Matrix::Constant(10, 3, 2.0), options);
  CHECK(flat.coords.isZero(0.0));
  CHECK(flat.final_loss == 0.0);
}

TEST_CASE("classical scaling recovers planar distances") {
  std::mt19937_64 g(93);
  const Matrix z = oracle::random_matrix(g, 12, 2);
  const Matrix d = pairwise_distances(z);
  const Matrix y = classical_scaling(d);
  CHECK((pairwise_distances(y) - d).cwiseAbs().maxCoeff() < 1e-9);
  const Embedding e = mds(z);
  CHECK(e.final_loss < 1e-12);
  CHECK(mds_stress(d, z) == doctest::Approx(0.0));
  CHECK_THROWS_AS(mds(z.topRows(2)), InvalidArgument);
}

TEST_CASE("MDS stress never increases") {
  std::mt19937_64 g(94);
  const Matrix z = oracle::random_matrix(g, 20, 6);
  MdsOptions options;
  options.seed = 8;
  const Embedding e = mds(z, options);
  for (std::size_t t = 1; t < e.loss_trace.size(); ++t) CHECK(e.loss_trace[t] <= e.loss_trace[t - 1] + 1e-12);
  CHECK(e.final_loss <= mds_stress(pairwise_distances(z), classical_scaling(pairwise_distances(z))) + 1e-12);
}

TEST_CASE("LLE weights") {
  std::mt19937_64 g(95);
  const Matrix z = oracle::random_matrix(g, 25, 3);
  const Matrix w = lle_weights(z, 5);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    CHECK(w.row(i).sum() == doctest::Approx(1.0));
    CHECK(w(i, i) == 0.0);
    CHECK((w.row(i).array() != 0.0).count() <= 5);
  }

  Matrix line(6, 2);
  for (int i = 0; i < 6; ++i) line.row(i) << i, 2.0 * i;
  CHECK(lle_reconstruction_error(line, lle_weights(line, 2)) < 1e-12);

  const auto nn = nearest_neighbors(Matrix::Zero(4, 1), 2);
  CHECK(nn[0] == std::vector<std::size_t>{1, 2});
  CHECK(nn[3] == std::vector<std::size_t>{0, 1});
}

TEST_CASE("LLE embedding") {
  std::mt19937_64 g(96);
  const Matrix z = oracle::random_matrix(g, 40, 3);
  LleOptions options;
  options.neighbors = 8;
  const Embedding e = lle(z, options);
  CHECK(e.coords.rows() == 40);
  CHECK(e.coords.allFinite());
  CHECK(e.coords.colwise().sum().cwiseAbs().maxCoeff() < 1e-6);
  const Matrix gram = e.coords.transpose() * e.coords / 40.0;
  CHECK((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
  options.neighbors = 1;
  CHECK_THROWS_AS(lle(z, options), InvalidArgument);
  options.neighbors = 40;
  CHECK_THROWS_AS(lle(z, options), InvalidArgument);
}

TEST_CASE("embedding CSV") {
  Embedding e;
  e.coords = Matrix::Zero(2, 2);
  CHECK(embedding_to_csv(e).rfind("sample,x,y\n", 0) == 0);
  const std::vector<int> labels = {3, 4};
  const std::string csv = embedding_to_csv(e, &labels);
  CHECK(csv.rfind("sample,x,y,label\n", 0) == 0);
  CHECK(csv.find("1,0,0,4") != std::string::npos);
  CHECK(parse_embed_method("mds") == EmbedMethod::mds);
  CHECK_THROWS_AS(parse_embed_method("umap"), InvalidArgument);
}
