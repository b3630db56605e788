#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dopclust/common.hpp"

namespace dopclust {

enum class ClusterMethod { kmeans, kmedoids };

std::string_view to_string(ClusterMethod method);
ClusterMethod parse_cluster_method(std::string_view name);

/// A fitted partition model. Immutable once returned from a fit.
struct ClusterModel {
  ClusterMethod method = ClusterMethod::kmeans;
  Matrix centers;                          // K x m
  std::vector<std::size_t> medoid_indices; // K entries for kmedoids, empty for kmeans
  Labels labels;                           // training assignment
  double objective = 0.0;                  // sum of squared distances to assigned centers
  std::vector<double> objective_trace;     // objective after every assignment step
  int iterations = 0;
  std::uint64_t seed = 0;

  int k() const { return static_cast<int>(centers.rows()); }
};

struct ClustererConfig {
  ClusterMethod method = ClusterMethod::kmeans;
  int k = 5;
  std::uint64_t seed = 0;
  int max_iter = 300;
  double tol = 1e-6;  // relative objective change
  int n_init = 10;    // seeded restarts for fit(); best objective wins
};

ClusterModel kmeans_fit(const Matrix& Z, int k, std::uint64_t seed, int max_iter = 300, double tol = 1e-6);

// Lloyd iterations from explicit starting centers.
ClusterModel kmeans_fit_from(const Matrix& Z, const Matrix& initial_centers, int max_iter = 300, double tol = 1e-6);

ClusterModel kmedoids_fit(const Matrix& Z, int k, std::uint64_t seed, int max_iter = 300);

// Best of config.n_init seeded restarts of the configured method. Ties keep
// the earlier restart.
ClusterModel fit(const Matrix& Z, const ClustererConfig& config);

// k-means++ seeding: row indices of the initial centers. Distinct rows are
// chosen even when the data contain duplicates.
std::vector<std::size_t> kmeanspp_init(const Matrix& Z, int k, std::uint64_t seed);

// Nearest center by squared Euclidean distance; ties go to the lowest index.
Labels assign(const ClusterModel& model, const Matrix& Z);
Labels assign_to_centers(const Matrix& centers, const Matrix& Z);

// Sum over rows of the squared distance to the row's assigned center.
double assignment_cost(const Matrix& Z, const Labels& labels, const Matrix& centers);

std::string to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(std::string_view json);

}  // namespace dopclust
