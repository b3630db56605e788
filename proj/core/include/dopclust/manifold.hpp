#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dopclust/common.hpp"

namespace dopclust {

enum class EmbedMethod { tsne, mds, lle };

std::string_view to_string(EmbedMethod method);
EmbedMethod parse_embed_method(std::string_view name);

/// A 2-D embedding of n samples.
struct Embedding {
  Matrix coords;  // n x 2
  EmbedMethod method = EmbedMethod::tsne;
  double final_loss = 0.0;  // KL for t-SNE, stress for MDS, reconstruction cost for LLE
  std::vector<double> loss_trace;
  int iterations = 0;
  std::uint64_t seed = 0;
  std::string params_json;
};

// Euclidean (not squared) pairwise distances.
Matrix pairwise_distances(const Matrix& Z);

// --- t-SNE -----------------------------------------------------------------

struct TsneOptions {
  double perplexity = 15.0;
  int iterations = 1000;
  double learning_rate = 100.0;
  double early_exaggeration = 4.0;
  int exaggeration_iters = 100;
  std::uint64_t seed = 0;
  int dims = 2;
};

// Row-conditional Gaussian affinities p_{j|i}; each row's bandwidth is
// binary-searched so its entropy is log2(perplexity) bits. Rows sum to 1.
Matrix tsne_conditional_affinities(const Matrix& Z, double perplexity);

// Shannon entropy (bits) of each row of a row-stochastic matrix.
Vector row_entropies_bits(const Matrix& P);

// (P + P^T) / (2n).
Matrix tsne_joint_affinities(const Matrix& conditional);

// KL(P || Q) for the Student-t affinities of the given coordinates.
double tsne_kl(const Matrix& P, const Matrix& Y);

Embedding tsne(const Matrix& Z, const TsneOptions& options = {});

// --- MDS -------------------------------------------------------------------

struct MdsOptions {
  int iterations = 300;
  int random_starts = 4;  // seeded random starts; a classical-scaling start is always added
  double tol = 1e-12;     // relative stress decrease that ends a run
  std::uint64_t seed = 0;
};

// sum_{i != j} (d_ij - ||y_i - y_j||)^2
double mds_stress(const Matrix& dissimilarities, const Matrix& Y);

// Classical (Torgerson) scaling to 2-D.
Matrix classical_scaling(const Matrix& dissimilarities);

Embedding mds(const Matrix& Z, const MdsOptions& options = {});
Embedding mds_from_dissimilarities(const Matrix& D, const MdsOptions& options = {});

// --- LLE -------------------------------------------------------------------

struct LleOptions {
  int neighbors = 10;
  int dims = 2;
  double reg = 1e-3;
};

// p nearest neighbours of each row (self excluded); ties go to lower index.
std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& Z, int p);

// Sum-to-one reconstruction weights, n x n with p nonzeros per row.
Matrix lle_weights(const Matrix& Z, int neighbors, double reg = 1e-3);

// sum_i ||x_i - sum_j W_ij x_j||^2
double lle_reconstruction_error(const Matrix& Z, const Matrix& W);

Embedding lle(const Matrix& Z, const LleOptions& options = {});

// CSV: sample,x,y[,label]
std::string embedding_to_csv(const Embedding& embedding, const std::vector<int>* labels = nullptr);

}  // namespace dopclust
