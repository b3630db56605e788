#include "dopclust/clustering.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "dopclust/parallel.hpp"
#include "dopclust/random.hpp"

namespace dopclust {

std::string_view to_string(ClusterMethod method) {
  return method == ClusterMethod::kmeans ? "kmeans" : "kmedoids";
}

ClusterMethod parse_cluster_method(std::string_view name) {
  if (name == "kmeans") return ClusterMethod::kmeans;
  if (name == "kmedoids") return ClusterMethod::kmedoids;
  throw InvalidArgument("unknown clusterer '" + std::string(name) + "' (expected kmeans or kmedoids)");
}

namespace {

void validate_input(const Matrix& Z, int k, const char* who) {
  if (k < 1) throw InvalidArgument(std::string(who) + ": K must be >= 1, got " + std::to_string(k));
  if (k > Z.rows()) {
    throw InvalidArgument(std::string(who) + ": K = " + std::to_string(k) + " exceeds the number of points " +
                          std::to_string(Z.rows()));
  }
  if (!Z.allFinite()) throw InvalidArgument(std::string(who) + ": input contains non-finite values");
}

double squared_distance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

// Nearest-center labels and the resulting cost.
double assign_into(const Matrix& Z, const Matrix& centers, Labels& labels) {
  labels.resize(static_cast<std::size_t>(Z.rows()));
  double cost = 0.0;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
      const double d = squared_distance(Z, i, centers, j);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    cost += best_d;
  }
  return cost;
}

std::vector<int> cluster_sizes(const Labels& labels, int k) {
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

// Moves the point farthest from its center into each empty cluster. Only
// points from clusters with more than one member are eligible. Returns the
// row index chosen per empty cluster (or -1 when nothing could be moved).
void fill_empty_clusters(const Matrix& Z, const Matrix& centers, Labels& labels,
                         const std::vector<char>& is_fixed_center, std::vector<Eigen::Index>& moved_to) {
  const int k = static_cast<int>(centers.rows());
  auto sizes = cluster_sizes(labels, k);
  moved_to.assign(static_cast<std::size_t>(k), -1);
  for (int j = 0; j < k; ++j) {
    if (sizes[static_cast<std::size_t>(j)] > 0) continue;
    Eigen::Index far = -1;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      const int l = labels[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(l)] <= 1) continue;
      if (!is_fixed_center.empty() && is_fixed_center[static_cast<std::size_t>(i)]) continue;
      const double d = squared_distance(Z, i, centers, l);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far < 0 || far_d <= 0.0) continue;
    --sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
    labels[static_cast<std::size_t>(far)] = j;
    ++sizes[static_cast<std::size_t>(j)];
    moved_to[static_cast<std::size_t>(j)] = far;
  }
}

Matrix cluster_means(const Matrix& Z, const Labels& labels, const Matrix& previous) {
  const int k = static_cast<int>(previous.rows());
  Matrix sums = Matrix::Zero(k, Z.cols());
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    sums.row(l) += Z.row(i);
    ++counts[static_cast<std::size_t>(l)];
  }
  for (int j = 0; j < k; ++j) {
    if (counts[static_cast<std::size_t>(j)] > 0) {
      sums.row(j) /= static_cast<double>(counts[static_cast<std::size_t>(j)]);
    } else {
      sums.row(j) = previous.row(j);
    }
  }
  return sums;
}

// One sweep of Hartigan single-point transfers: a point moves to another
// cluster whenever that lowers the total within-cluster sum of squares.
// Centers are kept equal to the cluster means. Returns whether anything moved.
bool transfer_pass(const Matrix& Z, Labels& labels, Matrix& centers) {
  const int k = static_cast<int>(centers.rows());
  auto sizes = cluster_sizes(labels, k);
  bool moved_any = false;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const int a = labels[static_cast<std::size_t>(i)];
    const int na = sizes[static_cast<std::size_t>(a)];
    if (na <= 1) continue;
    const double removal = na / (na - 1.0) * squared_distance(Z, i, centers, a);
    int best = -1;
    double best_add = removal;
    for (int b = 0; b < k; ++b) {
      if (b == a) continue;
      const int nb = sizes[static_cast<std::size_t>(b)];
      const double add = nb / (nb + 1.0) * squared_distance(Z, i, centers, b);
      if (add < best_add) {
        best_add = add;
        best = b;
      }
    }
    if (best < 0 || removal - best_add <= 1e-12 * std::max(removal, 1e-300)) continue;
    const int nb = sizes[static_cast<std::size_t>(best)];
    centers.row(a) = (na * centers.row(a) - Z.row(i)) / (na - 1.0);
    centers.row(best) = (nb * centers.row(best) + Z.row(i)) / (nb + 1.0);
    --sizes[static_cast<std::size_t>(a)];
    ++sizes[static_cast<std::size_t>(best)];
    labels[static_cast<std::size_t>(i)] = best;
    moved_any = true;
  }
  if (moved_any) centers = cluster_means(Z, labels, centers);
  return moved_any;
}

// Best single medoid/non-medoid exchange (PAM swap step). Applies it and
// returns true when it lowers the cost; scan order breaks ties.
bool best_swap(const Matrix& dist, std::vector<std::size_t>& medoids, double objective) {
  const auto n = static_cast<std::size_t>(dist.rows());
  const std::size_t k = medoids.size();
  std::vector<char> is_medoid(n, 0);
  for (auto m : medoids) is_medoid[m] = 1;
  double best_cost = objective;
  std::size_t best_slot = k, best_point = n;
  std::vector<std::size_t> trial = medoids;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (std::size_t h = 0; h < n; ++h) {
      if (is_medoid[h]) continue;
      trial[slot] = h;
      double cost = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double d = std::numeric_limits<double>::infinity();
        for (auto m : trial) d = std::min(d, dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)));
        cost += d;
      }
      if (cost < best_cost) {
        best_cost = cost;
        best_slot = slot;
        best_point = h;
      }
    }
    trial[slot] = medoids[slot];
  }
  if (best_slot == k || objective - best_cost <= 1e-12 * std::max(objective, 1e-300)) return false;
  medoids[best_slot] = best_point;
  return true;
}

ClusterModel lloyd(const Matrix& Z, Matrix centers, int max_iter, double tol) {
  ClusterModel model;
  model.method = ClusterMethod::kmeans;
  Labels labels;
  double objective = assign_into(Z, centers, labels);
  model.objective_trace.push_back(objective);

  std::vector<Eigen::Index> moved;
  int it = 0;
  while (it < max_iter) {
    ++it;
    fill_empty_clusters(Z, centers, labels, {}, moved);
    for (std::size_t j = 0; j < moved.size(); ++j) {
      if (moved[j] >= 0) centers.row(static_cast<Eigen::Index>(j)) = Z.row(moved[j]);
    }
    centers = cluster_means(Z, labels, centers);

    Labels next;
    const double next_objective = assign_into(Z, centers, next);
    model.objective_trace.push_back(next_objective);
    const bool stable = next == labels;
    labels = std::move(next);
    const double previous = objective;
    objective = next_objective;
    if (stable || previous - objective <= tol * previous) {
      // Lloyd has converged; try single-point transfers before stopping.
      centers = cluster_means(Z, labels, centers);
      if (!transfer_pass(Z, labels, centers)) break;
      objective = assignment_cost(Z, labels, centers);
      model.objective_trace.push_back(objective);
    }
  }
  Labels nearest;
  const double nearest_cost = assign_into(Z, centers, nearest);
  if (nearest != labels && nearest_cost <= objective) {
    labels = std::move(nearest);
    objective = nearest_cost;
  }
  model.centers = std::move(centers);
  model.labels = std::move(labels);
  model.objective = objective;
  model.iterations = it;
  return model;
}

}  // namespace

std::vector<std::size_t> kmeanspp_init(const Matrix& Z, int k, std::uint64_t seed) {
  validate_input(Z, k, "kmeanspp_init");
  const auto n = static_cast<std::size_t>(Z.rows());
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  std::vector<char> taken(n, 0);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  auto add = [&](std::size_t idx) {
    chosen.push_back(idx);
    taken[idx] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(Z, static_cast<Eigen::Index>(i), Z, static_cast<Eigen::Index>(idx)));
    }
  };

  // Greedy variant: draw several distance-weighted candidates per step and
  // keep the one that lowers the potential most.
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  add(static_cast<std::size_t>(rng.below(n)));
  while (chosen.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) total += nearest[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      double best_potential = std::numeric_limits<double>::infinity();
      for (int t = 0; t < trials; ++t) {
        const double target = rng.uniform() * total;
        double cumulative = 0.0;
        std::size_t candidate = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (taken[i] || nearest[i] <= 0.0) continue;
          cumulative += nearest[i];
          candidate = i;
          if (cumulative > target) break;
        }
        double potential = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          potential += std::min(nearest[i], squared_distance(Z, static_cast<Eigen::Index>(i), Z,
                                                             static_cast<Eigen::Index>(candidate)));
        }
        if (potential < best_potential) {
          best_potential = potential;
          pick = candidate;
        }
      }
    }
    if (pick == n) {
      // Every remaining row duplicates a chosen one: take the lowest free index.
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i]) {
          pick = i;
          break;
        }
      }
    }
    add(pick);
  }
  return chosen;
}

ClusterModel kmeans_fit_from(const Matrix& Z, const Matrix& initial_centers, int max_iter, double tol) {
  validate_input(Z, static_cast<int>(initial_centers.rows()), "kmeans_fit");
  if (initial_centers.cols() != Z.cols()) throw InvalidArgument("kmeans_fit: initial centers have the wrong width");
  if (max_iter < 0) throw InvalidArgument("kmeans_fit: max_iter must be >= 0");
  return lloyd(Z, initial_centers, max_iter, tol);
}

ClusterModel kmeans_fit(const Matrix& Z, int k, std::uint64_t seed, int max_iter, double tol) {
  validate_input(Z, k, "kmeans_fit");
  const auto init = kmeanspp_init(Z, k, seed);
  Matrix centers(k, Z.cols());
  for (int j = 0; j < k; ++j) centers.row(j) = Z.row(static_cast<Eigen::Index>(init[static_cast<std::size_t>(j)]));
  auto model = kmeans_fit_from(Z, centers, max_iter, tol);
  model.seed = seed;
  return model;
}

ClusterModel kmedoids_fit(const Matrix& Z, int k, std::uint64_t seed, int max_iter) {
  validate_input(Z, k, "kmedoids_fit");
  if (max_iter < 0) throw InvalidArgument("kmedoids_fit: max_iter must be >= 0");
  const Eigen::Index n = Z.rows();

  Matrix dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) dist(i, j) = dist(j, i) = squared_distance(Z, i, Z, j);
  }

  std::vector<std::size_t> medoids = kmeanspp_init(Z, k, seed);
  auto centers_of = [&](const std::vector<std::size_t>& idx) {
    Matrix c(k, Z.cols());
    for (int j = 0; j < k; ++j) c.row(j) = Z.row(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    return c;
  };

  ClusterModel model;
  model.method = ClusterMethod::kmedoids;
  model.seed = seed;
  Labels labels;
  double objective = assign_into(Z, centers_of(medoids), labels);
  model.objective_trace.push_back(objective);

  std::vector<Eigen::Index> moved;
  int it = 0;
  while (it < max_iter) {
    ++it;
    std::vector<char> is_medoid(static_cast<std::size_t>(n), 0);
    for (auto m : medoids) is_medoid[m] = 1;
    fill_empty_clusters(Z, centers_of(medoids), labels, is_medoid, moved);

    // Medoid update: the member minimizing the summed squared distance to
    // its cluster; ties go to the lowest row index.
    std::vector<std::size_t> next_medoids = medoids;
    for (int j = 0; j < k; ++j) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_i = medoids[static_cast<std::size_t>(j)];
      bool any = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] != j) continue;
        // A duplicate row may sit in this cluster while being another
        // cluster's medoid; medoid indices stay distinct.
        bool used_elsewhere = false;
        for (int o = 0; o < k; ++o) {
          if (o != j && next_medoids[static_cast<std::size_t>(o)] == static_cast<std::size_t>(i)) used_elsewhere = true;
        }
        if (used_elsewhere) continue;
        any = true;
        double sum = 0.0;
        for (Eigen::Index q = 0; q < n; ++q) {
          if (labels[static_cast<std::size_t>(q)] == j) sum += dist(i, q);
        }
        if (sum < best) {
          best = sum;
          best_i = static_cast<std::size_t>(i);
        }
      }
      if (any) next_medoids[static_cast<std::size_t>(j)] = best_i;
    }

    Labels next;
    const double next_objective = assign_into(Z, centers_of(next_medoids), next);
    const bool unchanged = next_medoids == medoids;
    bool converged = next_objective > objective;  // round-off only: keep the current medoids
    if (!converged) {
      model.objective_trace.push_back(next_objective);
      converged = unchanged;
      medoids = std::move(next_medoids);
      labels = std::move(next);
      objective = next_objective;
    }
    if (converged) {
      // Alternation has stalled; try exchanging a medoid for a non-medoid.
      if (!best_swap(dist, medoids, objective)) break;
      objective = assign_into(Z, centers_of(medoids), labels);
      model.objective_trace.push_back(objective);
    }
  }

  model.medoid_indices = medoids;
  model.centers = centers_of(medoids);
  model.labels = std::move(labels);
  model.objective = objective;
  model.iterations = it;
  return model;
}

ClusterModel fit(const Matrix& Z, const ClustererConfig& config) {
  if (config.n_init < 1) throw InvalidArgument("fit: n_init must be >= 1");
  validate_input(Z, config.k, "fit");
  std::vector<ClusterModel> runs(static_cast<std::size_t>(config.n_init));
  parallel_for(runs.size(), [&](std::size_t r) {
    const auto seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
    runs[r] = config.method == ClusterMethod::kmeans ? kmeans_fit(Z, config.k, seed, config.max_iter, config.tol)
                                                     : kmedoids_fit(Z, config.k, seed, config.max_iter);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].objective < runs[best].objective) best = r;
  }
  return std::move(runs[best]);
}

Labels assign_to_centers(const Matrix& centers, const Matrix& Z) {
  if (Z.rows() == 0) return {};
  if (Z.cols() != centers.cols()) {
    throw InvalidArgument("assign: points have " + std::to_string(Z.cols()) + " columns, model has " +
                          std::to_string(centers.cols()));
  }
  Labels labels;
  assign_into(Z, centers, labels);
  return labels;
}

Labels assign(const ClusterModel& model, const Matrix& Z) { return assign_to_centers(model.centers, Z); }

double assignment_cost(const Matrix& Z, const Labels& labels, const Matrix& centers) {
  if (labels.size() != static_cast<std::size_t>(Z.rows())) throw InvalidArgument("assignment_cost: label count mismatch");
  double cost = 0.0;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    if (l < 0 || l >= centers.rows()) throw InvalidArgument("assignment_cost: label out of range");
    cost += squared_distance(Z, i, centers, l);
  }
  return cost;
}

std::string to_json(const ClusterModel& model) {
  nlohmann::ordered_json j;
  j["method"] = to_string(model.method);
  j["k"] = model.k();
  auto centers = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < model.centers.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < model.centers.cols(); ++c) row.push_back(model.centers(r, c));
    centers.push_back(std::move(row));
  }
  j["centers"] = std::move(centers);
  j["medoid_indices"] = model.medoid_indices;
  j["seed"] = model.seed;
  j["objective"] = model.objective;
  j["iterations"] = model.iterations;
  return j.dump(2);
}

ClusterModel cluster_model_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ClusterModel model;
    model.method = parse_cluster_method(j.at("method").get<std::string>());
    const auto& rows = j.at("centers");
    const auto k = static_cast<Eigen::Index>(rows.size());
    const auto m = k > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    model.centers.resize(k, m);
    for (Eigen::Index r = 0; r < k; ++r) {
      if (static_cast<Eigen::Index>(rows.at(static_cast<std::size_t>(r)).size()) != m) {
        throw DataError("cluster model: ragged centers");
      }
      for (Eigen::Index c = 0; c < m; ++c) {
        model.centers(r, c) = rows.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
      }
    }
    model.medoid_indices = j.value("medoid_indices", std::vector<std::size_t>{});
    model.seed = j.value("seed", std::uint64_t{0});
    model.objective = j.value("objective", 0.0);
    model.iterations = j.value("iterations", 0);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("cluster model JSON: ") + e.what());
  }
}

}  // namespace dopclust
