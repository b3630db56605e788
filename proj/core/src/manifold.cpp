#include "dopclust/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include <json.hpp>

#include "dopclust/io.hpp"
#include "dopclust/random.hpp"

namespace dopclust {

std::string_view to_string(EmbedMethod method) {
  switch (method) {
    case EmbedMethod::tsne: return "tsne";
    case EmbedMethod::mds: return "mds";
    case EmbedMethod::lle: return "lle";
  }
  return "unknown";
}

EmbedMethod parse_embed_method(std::string_view name) {
  if (name == "tsne") return EmbedMethod::tsne;
  if (name == "mds") return EmbedMethod::mds;
  if (name == "lle") return EmbedMethod::lle;
  throw InvalidArgument("unknown embedding method '" + std::string(name) + "' (expected tsne, mds or lle)");
}

namespace {

Matrix squared_distances(const Matrix& Z) {
  const Vector norms = Z.rowwise().squaredNorm();
  Matrix d = (-2.0 * Z * Z.transpose()).colwise() + norms;
  d.rowwise() += norms.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

bool all_rows_identical(const Matrix& Z) {
  for (Eigen::Index i = 1; i < Z.rows(); ++i) {
    if (Z.row(i) != Z.row(0)) return false;
  }
  return true;
}

void check_finite(const Matrix& Z, const char* who) {
  if (!Z.allFinite()) throw InvalidArgument(std::string(who) + ": input contains non-finite values");
}

// Flip each column so its largest-magnitude entry is positive.
void canonicalize_signs(Matrix& Y) {
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    Eigen::Index arg = 0;
    Y.col(j).cwiseAbs().maxCoeff(&arg);
    if (Y(arg, j) < 0.0) Y.col(j) *= -1.0;
  }
}

}  // namespace

Matrix pairwise_distances(const Matrix& Z) {
  Matrix d(Z.rows(), Z.rows());
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < Z.rows(); ++j) d(i, j) = d(j, i) = (Z.row(i) - Z.row(j)).norm();
  }
  return d;
}

// ---------------------------------------------------------------------------
// t-SNE

Matrix tsne_conditional_affinities(const Matrix& Z, double perplexity) {
  const Eigen::Index n = Z.rows();
  if (n < 2) throw InvalidArgument("tsne: need at least 2 points");
  if (!(perplexity >= 1.0) || perplexity > static_cast<double>(n - 1)) {
    throw InvalidArgument("tsne: perplexity " + io::format_double(perplexity) + " infeasible for " +
                          std::to_string(n) + " points (need perplexity <= n - 1)");
  }
  const Matrix d2 = squared_distances(Z);
  const double target = std::log2(perplexity);
  Matrix P = Matrix::Zero(n, n);

  for (Eigen::Index i = 0; i < n; ++i) {
    double min_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) min_d = std::min(min_d, d2(i, j));
    }
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    Vector row(n);
    for (int iter = 0; iter < 200; ++iter) {
      double sum = 0.0;
      double weighted = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = d2(i, j) - min_d;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      // Entropy in nats of the normalized row, converted to bits.
      const double h = (std::log(sum) + beta * weighted / sum) / std::log(2.0);
      row /= sum;
      const double diff = h - target;
      if (std::abs(diff) < 1e-6) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    P.row(i) = row.transpose();
  }
  return P;
}

Vector row_entropies_bits(const Matrix& P) {
  Vector h(P.rows());
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      if (P(i, j) > 0.0) s -= P(i, j) * std::log2(P(i, j));
    }
    h[i] = s;
  }
  return h;
}

Matrix tsne_joint_affinities(const Matrix& conditional) {
  return (conditional + conditional.transpose()) / (2.0 * static_cast<double>(conditional.rows()));
}

double tsne_kl(const Matrix& P, const Matrix& Y) {
  const Eigen::Index n = Y.rows();
  const Matrix d2 = squared_distances(Y);
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) z += 1.0 / (1.0 + d2(i, j));
    }
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || P(i, j) <= 0.0) continue;
      const double q = std::max(1.0 / (1.0 + d2(i, j)) / z, 1e-300);
      kl += P(i, j) * std::log(P(i, j) / q);
    }
  }
  return std::max(kl, 0.0);
}

Embedding tsne(const Matrix& Z, const TsneOptions& options) {
  const Eigen::Index n = Z.rows();
  if (n < 4) throw InvalidArgument("tsne: need at least 4 points, got " + std::to_string(n));
  if (options.perplexity < 2.0) throw InvalidArgument("tsne: perplexity must be >= 2");
  if (options.iterations < 1) throw InvalidArgument("tsne: iterations must be >= 1");
  if (options.dims < 1) throw InvalidArgument("tsne: dims must be >= 1");
  check_finite(Z, "tsne");

  Embedding out;
  out.method = EmbedMethod::tsne;
  out.seed = options.seed;
  out.params_json = nlohmann::ordered_json{{"perplexity", options.perplexity},
                                           {"iterations", options.iterations},
                                           {"learning_rate", options.learning_rate},
                                           {"early_exaggeration", options.early_exaggeration},
                                           {"exaggeration_iters", options.exaggeration_iters},
                                           {"seed", options.seed}}
                        .dump();

  const Matrix P = tsne_joint_affinities(tsne_conditional_affinities(Z, options.perplexity));
  if (all_rows_identical(Z)) {
    // Coincident embedding: Q is uniform like P, KL and gradient vanish.
    out.coords = Matrix::Zero(n, options.dims);
    out.final_loss = 0.0;
    out.loss_trace.push_back(0.0);
    return out;
  }

  Rng rng(options.seed);
  Matrix Y(n, options.dims);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < options.dims; ++c) Y(i, c) = 1e-4 * rng.normal();
  }
  Matrix update = Matrix::Zero(n, options.dims);
  Matrix gains = Matrix::Ones(n, options.dims);
  Matrix grad(n, options.dims);
  Matrix num(n, n);

  for (int it = 0; it < options.iterations; ++it) {
    const double exaggeration = it < options.exaggeration_iters ? options.early_exaggeration : 1.0;
    const double momentum = it < 250 ? 0.5 : 0.8;

    const Matrix d2 = squared_distances(Y);
    double z = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        num(i, j) = i == j ? 0.0 : 1.0 / (1.0 + d2(i, j));
        z += num(i, j);
      }
    }
    grad.setZero();
    double kl = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = num(i, j) / z;
        const double coeff = 4.0 * (exaggeration * P(i, j) - q) * num(i, j);
        grad.row(i) += coeff * (Y.row(i) - Y.row(j));
        if (P(i, j) > 0.0) kl += P(i, j) * std::log(P(i, j) / std::max(q, 1e-300));
      }
    }
    out.loss_trace.push_back(std::max(kl, 0.0));

    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < options.dims; ++c) {
        const bool same_sign = (grad(i, c) > 0.0) == (update(i, c) > 0.0);
        gains(i, c) = same_sign ? std::max(gains(i, c) * 0.8, 0.01) : gains(i, c) + 0.2;
        update(i, c) = momentum * update(i, c) - options.learning_rate * gains(i, c) * grad(i, c);
      }
    }
    Y += update;
    Y.rowwise() -= Y.colwise().mean();
  }

  out.coords = std::move(Y);
  out.final_loss = tsne_kl(P, out.coords);
  out.loss_trace.push_back(out.final_loss);
  out.iterations = options.iterations;
  return out;
}

// ---------------------------------------------------------------------------
// MDS

double mds_stress(const Matrix& dissimilarities, const Matrix& Y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    for (Eigen::Index j = 0; j < Y.rows(); ++j) {
      if (i == j) continue;
      const double r = dissimilarities(i, j) - (Y.row(i) - Y.row(j)).norm();
      s += r * r;
    }
  }
  return s;
}

Matrix classical_scaling(const Matrix& dissimilarities) {
  const Eigen::Index n = dissimilarities.rows();
  const Matrix d2 = dissimilarities.array().square().matrix();
  const Matrix centering = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix b = -0.5 * centering * d2 * centering;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  Matrix Y = Matrix::Zero(n, 2);
  for (int c = 0; c < 2 && c < n; ++c) {
    const Eigen::Index idx = n - 1 - c;
    const double lambda = std::max(0.0, eig.eigenvalues()[idx]);
    Y.col(c) = eig.eigenvectors().col(idx) * std::sqrt(lambda);
  }
  canonicalize_signs(Y);
  return Y;
}

namespace {

struct SmacofRun {
  Matrix Y;
  std::vector<double> trace;
  int iterations = 0;
};

// Guttman-transform iterations; stress is non-increasing at every step.
SmacofRun smacof(const Matrix& D, Matrix Y, int iterations, double tol) {
  const Eigen::Index n = D.rows();
  SmacofRun run;
  double stress = mds_stress(D, Y);
  run.trace.push_back(stress);
  Matrix B(n, n);
  int it = 0;
  for (; it < iterations && stress > 0.0; ++it) {
    B.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double dist = (Y.row(i) - Y.row(j)).norm();
        B(i, j) = dist > 0.0 ? -D(i, j) / dist : 0.0;
      }
      B(i, i) = -B.row(i).sum();
    }
    Matrix next = B * Y / static_cast<double>(n);
    const double next_stress = mds_stress(D, next);
    if (next_stress > stress) break;  // round-off only
    Y = std::move(next);
    const double previous = stress;
    stress = next_stress;
    run.trace.push_back(stress);
    if (previous - stress <= tol * previous) {
      ++it;
      break;
    }
  }
  run.Y = std::move(Y);
  run.iterations = it;
  return run;
}

}  // namespace

Embedding mds_from_dissimilarities(const Matrix& D, const MdsOptions& options) {
  const Eigen::Index n = D.rows();
  if (n < 3) throw InvalidArgument("mds: need at least 3 points (n >= 3), got " + std::to_string(n));
  if (D.cols() != n) throw InvalidArgument("mds: dissimilarity matrix must be square");
  if (options.iterations < 0 || options.random_starts < 0) throw InvalidArgument("mds: negative iteration count");
  check_finite(D, "mds");

  Embedding out;
  out.method = EmbedMethod::mds;
  out.seed = options.seed;
  out.params_json = nlohmann::ordered_json{{"iterations", options.iterations},
                                           {"random_starts", options.random_starts},
                                           {"tol", options.tol},
                                           {"seed", options.seed}}
                        .dump();

  std::vector<Matrix> starts;
  starts.push_back(classical_scaling(D));
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) scale += D(i, j);
  }
  scale /= static_cast<double>(n * n);
  if (scale <= 0.0) scale = 1.0;
  Rng rng(options.seed);
  for (int s = 0; s < options.random_starts; ++s) {
    Matrix y(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) y(i, c) = rng.uniform(-scale, scale);
    }
    starts.push_back(std::move(y));
  }

  std::optional<SmacofRun> best;
  for (auto& start : starts) {
    auto run = smacof(D, std::move(start), options.iterations, options.tol);
    if (!best || run.trace.back() < best->trace.back()) best = std::move(run);
  }
  out.coords = std::move(best->Y);
  out.loss_trace = std::move(best->trace);
  out.final_loss = out.loss_trace.back();
  out.iterations = best->iterations;
  return out;
}

Embedding mds(const Matrix& Z, const MdsOptions& options) {
  if (Z.rows() < 3) throw InvalidArgument("mds: need at least 3 points (n >= 3), got " + std::to_string(Z.rows()));
  check_finite(Z, "mds");
  return mds_from_dissimilarities(pairwise_distances(Z), options);
}

// ---------------------------------------------------------------------------
// LLE

std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& Z, int p) {
  const Eigen::Index n = Z.rows();
  if (p < 1 || p >= n) {
    throw InvalidArgument("nearest_neighbors: need 1 <= p < n, got p = " + std::to_string(p) + ", n = " +
                          std::to_string(n));
  }
  const Matrix d2 = squared_distances(Z);
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(n));
  std::vector<std::size_t> order;
  for (Eigen::Index i = 0; i < n; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) order.push_back(static_cast<std::size_t>(j));
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return d2(i, static_cast<Eigen::Index>(a)) < d2(i, static_cast<Eigen::Index>(b));
    });
    out[static_cast<std::size_t>(i)].assign(order.begin(), order.begin() + p);
  }
  return out;
}

namespace {

// Minimizes w^T G w subject to sum(w) = 1.
//
// When G has exactly one null direction with a nonzero sum, that direction
// reconstructs the point exactly and is the unique minimizer; it is used
// as-is. Otherwise (unique solution badly conditioned, or a multi-dimensional
// null space) the diagonal is regularized by reg * trace(G) / p.
Vector reconstruction_weights(const Matrix& G, double reg) {
  const Eigen::Index p = G.rows();
  const Vector ones = Vector::Ones(p);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
  const Vector& lambda = eig.eigenvalues();
  const double largest = std::max(lambda.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double null_tol = 1e-10 * largest;

  Eigen::Index null_dim = 0;
  Eigen::Index null_idx = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (lambda[i] <= null_tol) {
      ++null_dim;
      null_idx = i;
    }
  }
  if (null_dim == 1) {
    const Vector v = eig.eigenvectors().col(null_idx);
    const double s = v.sum();
    if (std::abs(s) > 1e-8 * std::sqrt(static_cast<double>(p))) return v / s;
  }

  Vector w;
  if (null_dim == 0 && lambda.minCoeff() > 1e-12 * largest) {
    w = G.ldlt().solve(ones);
  } else {
    const double trace = G.trace();
    const double shift = trace > 0.0 ? reg * trace / static_cast<double>(p) : std::max(reg, 1e-12);
    Matrix regularized = G;
    regularized.diagonal().array() += shift;
    w = regularized.ldlt().solve(ones);
  }
  return w / w.sum();
}

}  // namespace

Matrix lle_weights(const Matrix& Z, int neighbors, double reg) {
  check_finite(Z, "lle");
  if (reg < 0.0) throw InvalidArgument("lle: reg must be >= 0");
  const auto nbrs = nearest_neighbors(Z, neighbors);
  const Eigen::Index n = Z.rows();
  Matrix W = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& idx = nbrs[static_cast<std::size_t>(i)];
    Matrix local(neighbors, Z.cols());
    for (int a = 0; a < neighbors; ++a) local.row(a) = Z.row(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)])) - Z.row(i);
    const Matrix G = local * local.transpose();
    const Vector w = reconstruction_weights(G, reg);
    for (int a = 0; a < neighbors; ++a) W(i, static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)])) = w[a];
  }
  return W;
}

double lle_reconstruction_error(const Matrix& Z, const Matrix& W) {
  return (Z - W * Z).squaredNorm();
}

Embedding lle(const Matrix& Z, const LleOptions& options) {
  const Eigen::Index n = Z.rows();
  if (options.dims < 1) throw InvalidArgument("lle: dims must be >= 1");
  if (options.neighbors < options.dims) {
    throw InvalidArgument("lle: neighbors (" + std::to_string(options.neighbors) + ") must be >= dims (" +
                          std::to_string(options.dims) + ")");
  }
  if (n <= options.neighbors) {
    throw InvalidArgument("lle: need more points than neighbors (n = " + std::to_string(n) +
                          ", neighbors = " + std::to_string(options.neighbors) + ")");
  }
  if (n <= options.dims + 1) throw InvalidArgument("lle: need n > dims + 1");

  const Matrix W = lle_weights(Z, options.neighbors, options.reg);
  const Matrix IW = Matrix::Identity(n, n) - W;
  const Matrix M = IW.transpose() * IW;

  // Restrict to the complement of the constant vector, pushing the constant
  // direction to the top of the spectrum.
  const Matrix P = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix deflated = P * M * P + (M.trace() + 1.0) * Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(deflated);
  if (eig.info() != Eigen::Success) throw NumericalError("lle: eigendecomposition failed");

  Matrix Y = eig.eigenvectors().leftCols(options.dims) * std::sqrt(static_cast<double>(n));
  canonicalize_signs(Y);

  Embedding out;
  out.method = EmbedMethod::lle;
  out.coords = std::move(Y);
  out.final_loss = std::max(0.0, (out.coords.transpose() * M * out.coords).trace());
  out.loss_trace.push_back(out.final_loss);
  out.iterations = 1;
  out.params_json = nlohmann::ordered_json{{"neighbors", options.neighbors},
                                           {"dims", options.dims},
                                           {"reg", options.reg}}
                        .dump();
  return out;
}

std::string embedding_to_csv(const Embedding& embedding, const std::vector<int>* labels) {
  if (labels && labels->size() != static_cast<std::size_t>(embedding.coords.rows())) {
    throw InvalidArgument("embedding_to_csv: label count does not match coordinates");
  }
  std::string out = labels ? "sample,x,y,label\n" : "sample,x,y\n";
  for (Eigen::Index i = 0; i < embedding.coords.rows(); ++i) {
    out += std::to_string(i) + "," + io::format_double(embedding.coords(i, 0)) + "," +
           io::format_double(embedding.coords.cols() > 1 ? embedding.coords(i, 1) : 0.0);
    if (labels) out += "," + std::to_string((*labels)[static_cast<std::size_t>(i)]);
    out += '\n';
  }
  return out;
}

}  // namespace dopclust
