#pragma once

#include <string>
#include <vector>

#include "dopclust/clustering.hpp"
#include "dopclust/common.hpp"

namespace dopclust {

// (1/n) sum_i min_j ||z_i - c_j||^2.
double distortion(const Matrix& Z, const Labels& labels, const Matrix& centers);

// Mean silhouette with plain Euclidean distances. Singleton clusters score 0.
double silhouette(const Matrix& Z, const Labels& labels);

// How the within-cluster spread of a cluster is summarized.
enum class SpreadMode {
  sum,   // sum of squared member-to-center distances
  mean,  // mean of squared member-to-center distances
};

// Per-cluster spread with respect to the given centers.
std::vector<double> cluster_spreads(const Matrix& Z, const Labels& labels, const Matrix& centers,
                                    SpreadMode mode = SpreadMode::sum);

// (1/K) sum_i max_{j != i} (spread_i + spread_j) / ||c_i - c_j||^2.
double davies_bouldin(const Matrix& Z, const Labels& labels, const Matrix& centers,
                      SpreadMode mode = SpreadMode::sum);

// min_{i<j} ||c_i - c_j||^2 / max_k spread_k.
double dunn(const Matrix& Z, const Labels& labels, const Matrix& centers, SpreadMode mode = SpreadMode::sum);

struct KSweepReport {
  std::vector<int> candidate_ks;
  std::vector<double> distortion;
  std::vector<double> silhouette;
  std::vector<double> davies_bouldin;
  std::vector<double> inverse_davies_bouldin;
  std::vector<double> dunn;
  int vote_silhouette = 0;
  int vote_davies_bouldin = 0;
  int vote_dunn = 0;
  int recommended_k = 0;
};

// Fits K-Means for every candidate K (config.k is ignored) and scores it.
// Each K > previous also tries a warm start from the previous best centers
// plus one extra k-means++ center, so the distortion curve is non-increasing.
KSweepReport sweep_k(const Matrix& Z, const std::vector<int>& candidate_ks, const ClustererConfig& config,
                     SpreadMode mode = SpreadMode::sum);

std::string ksweep_to_csv(const KSweepReport& report);
std::string ksweep_to_json(const KSweepReport& report);

}  // namespace dopclust
