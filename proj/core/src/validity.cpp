#include "dopclust/validity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "dopclust/io.hpp"
#include "dopclust/random.hpp"

namespace dopclust {

namespace {

void check_labels(const Matrix& Z, const Labels& labels, Eigen::Index k, const char* who) {
  if (labels.size() != static_cast<std::size_t>(Z.rows())) {
    throw InvalidArgument(std::string(who) + ": " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(Z.rows()) + " points");
  }
  for (int l : labels) {
    if (l < 0 || (k >= 0 && l >= k)) {
      throw InvalidArgument(std::string(who) + ": label " + std::to_string(l) + " has no matching center");
    }
  }
}

void check_centers(const Matrix& Z, const Matrix& centers, const char* who) {
  if (centers.rows() == 0) throw InvalidArgument(std::string(who) + ": no centers");
  if (centers.cols() != Z.cols()) throw InvalidArgument(std::string(who) + ": center width does not match data");
}

}  // namespace

double distortion(const Matrix& Z, const Labels& labels, const Matrix& centers) {
  check_centers(Z, centers, "distortion");
  check_labels(Z, labels, centers.rows(), "distortion");
  if (Z.rows() == 0) throw InvalidArgument("distortion: no points");
  double total = 0.0;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    total += (centers.rowwise() - Z.row(i)).rowwise().squaredNorm().minCoeff();
  }
  return total / static_cast<double>(Z.rows());
}

double silhouette(const Matrix& Z, const Labels& labels) {
  check_labels(Z, labels, -1, "silhouette");
  std::map<int, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(static_cast<Eigen::Index>(i));
  if (members.size() < 2) throw InvalidArgument("silhouette: requires at least 2 clusters");

  const Eigen::Index n = Z.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int own = labels[static_cast<std::size_t>(i)];
    const auto& own_members = members.at(own);
    if (own_members.size() == 1) continue;
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [cluster, idx] : members) {
      double sum = 0.0;
      for (auto j : idx) sum += (Z.row(i) - Z.row(j)).norm();
      if (cluster == own) {
        a = sum / static_cast<double>(idx.size() - 1);
      } else {
        b = std::min(b, sum / static_cast<double>(idx.size()));
      }
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

std::vector<double> cluster_spreads(const Matrix& Z, const Labels& labels, const Matrix& centers, SpreadMode mode) {
  check_centers(Z, centers, "cluster_spreads");
  check_labels(Z, labels, centers.rows(), "cluster_spreads");
  std::vector<double> spread(static_cast<std::size_t>(centers.rows()), 0.0);
  std::vector<int> count(static_cast<std::size_t>(centers.rows()), 0);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    spread[static_cast<std::size_t>(l)] += (Z.row(i) - centers.row(l)).squaredNorm();
    ++count[static_cast<std::size_t>(l)];
  }
  if (mode == SpreadMode::mean) {
    for (std::size_t j = 0; j < spread.size(); ++j) {
      if (count[j] > 0) spread[j] /= count[j];
    }
  }
  return spread;
}

double davies_bouldin(const Matrix& Z, const Labels& labels, const Matrix& centers, SpreadMode mode) {
  if (centers.rows() < 2) throw InvalidArgument("davies_bouldin: requires at least 2 clusters");
  const auto spread = cluster_spreads(Z, labels, centers, mode);
  const Eigen::Index k = centers.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i == j) continue;
      const double separation = (centers.row(i) - centers.row(j)).squaredNorm();
      if (separation <= 0.0) {
        throw NumericalError("davies_bouldin: centers " + std::to_string(std::min(i, j)) + " and " +
                             std::to_string(std::max(i, j)) + " coincide");
      }
      worst = std::max(worst, (spread[static_cast<std::size_t>(i)] + spread[static_cast<std::size_t>(j)]) / separation);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

double dunn(const Matrix& Z, const Labels& labels, const Matrix& centers, SpreadMode mode) {
  if (centers.rows() < 2) throw InvalidArgument("dunn: requires at least 2 clusters");
  const auto spread = cluster_spreads(Z, labels, centers, mode);
  double min_separation = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < centers.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < centers.rows(); ++j) {
      min_separation = std::min(min_separation, (centers.row(i) - centers.row(j)).squaredNorm());
    }
  }
  const double max_spread = *std::max_element(spread.begin(), spread.end());
  if (max_spread <= 0.0) throw NumericalError("dunn: every cluster has zero spread (division by zero)");
  return min_separation / max_spread;
}

// ---------------------------------------------------------------------------

namespace {

// First index holding the maximum; candidates are visited in ascending K.
int argmax_k(const std::vector<int>& ks, const std::vector<double>& values) {
  std::vector<std::size_t> order(ks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ks[a] < ks[b]; });
  std::size_t best = order.front();
  for (auto i : order) {
    if (values[i] > values[best]) best = i;
  }
  return ks[best];
}

// Previous centers plus k-means++ draws for the missing ones.
Matrix extend_centers(const Matrix& Z, const Matrix& previous, int k, std::uint64_t seed) {
  Matrix centers(k, Z.cols());
  centers.topRows(previous.rows()) = previous;
  Rng rng(seed);
  for (Eigen::Index c = previous.rows(); c < k; ++c) {
    Vector nearest(Z.rows());
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      nearest[i] = (centers.topRows(c).rowwise() - Z.row(i)).rowwise().squaredNorm().minCoeff();
    }
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      for (Eigen::Index i = 0; i < Z.rows(); ++i) {
        if (nearest[i] <= 0.0) continue;
        cumulative += nearest[i];
        pick = i;
        if (cumulative > target) break;
      }
    }
    centers.row(c) = Z.row(pick);
  }
  return centers;
}

}  // namespace

KSweepReport sweep_k(const Matrix& Z, const std::vector<int>& candidate_ks, const ClustererConfig& config,
                     SpreadMode mode) {
  if (candidate_ks.empty()) throw InvalidArgument("sweep_k: no candidate K");
  for (int k : candidate_ks) {
    if (k < 2) throw InvalidArgument("sweep_k: candidate K must be >= 2, got " + std::to_string(k));
    if (k > Z.rows()) {
      throw InvalidArgument("sweep_k: candidate K = " + std::to_string(k) + " exceeds the number of points " +
                            std::to_string(Z.rows()));
    }
  }

  KSweepReport report;
  report.candidate_ks = candidate_ks;
  std::vector<std::size_t> order(candidate_ks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return candidate_ks[a] < candidate_ks[b]; });

  const std::size_t m = candidate_ks.size();
  report.distortion.resize(m);
  report.silhouette.resize(m);
  report.davies_bouldin.resize(m);
  report.inverse_davies_bouldin.resize(m);
  report.dunn.resize(m);

  std::optional<ClusterModel> previous;
  for (auto idx : order) {
    const int k = candidate_ks[idx];
    ClustererConfig cfg = config;
    cfg.method = ClusterMethod::kmeans;
    cfg.k = k;
    cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(k));
    ClusterModel model = fit(Z, cfg);
    if (previous && previous->k() < k) {
      const Matrix init = extend_centers(Z, previous->centers, k, derive_seed(cfg.seed, "warm-start"));
      ClusterModel warm = kmeans_fit_from(Z, init, cfg.max_iter, cfg.tol);
      if (warm.objective < model.objective) {
        warm.seed = cfg.seed;
        model = std::move(warm);
      }
    }

    report.distortion[idx] = distortion(Z, model.labels, model.centers);
    report.silhouette[idx] = silhouette(Z, model.labels);
    report.davies_bouldin[idx] = davies_bouldin(Z, model.labels, model.centers, mode);
    report.inverse_davies_bouldin[idx] = 1.0 / report.davies_bouldin[idx];
    report.dunn[idx] = dunn(Z, model.labels, model.centers, mode);
    previous = std::move(model);
  }

  report.vote_silhouette = argmax_k(candidate_ks, report.silhouette);
  report.vote_davies_bouldin = argmax_k(candidate_ks, report.inverse_davies_bouldin);
  report.vote_dunn = argmax_k(candidate_ks, report.dunn);

  std::map<int, int> votes;
  for (int v : {report.vote_silhouette, report.vote_davies_bouldin, report.vote_dunn}) ++votes[v];
  int best_k = 0;
  int best_votes = 0;
  for (const auto& [k, count] : votes) {  // ascending K, so ties keep the smaller K
    if (count > best_votes) {
      best_votes = count;
      best_k = k;
    }
  }
  report.recommended_k = best_k;
  return report;
}

std::string ksweep_to_csv(const KSweepReport& report) {
  std::string out = "k,distortion,silhouette,davies_bouldin,inverse_davies_bouldin,dunn\n";
  for (std::size_t i = 0; i < report.candidate_ks.size(); ++i) {
    out += std::to_string(report.candidate_ks[i]) + "," + io::format_double(report.distortion[i]) + "," +
           io::format_double(report.silhouette[i]) + "," + io::format_double(report.davies_bouldin[i]) + "," +
           io::format_double(report.inverse_davies_bouldin[i]) + "," + io::format_double(report.dunn[i]) + "\n";
  }
  return out;
}

std::string ksweep_to_json(const KSweepReport& report) {
  nlohmann::ordered_json j;
  j["candidate_ks"] = report.candidate_ks;
  j["distortion"] = report.distortion;
  j["silhouette"] = report.silhouette;
  j["davies_bouldin"] = report.davies_bouldin;
  j["inverse_davies_bouldin"] = report.inverse_davies_bouldin;
  j["dunn"] = report.dunn;
  j["votes"] = {{"silhouette", report.vote_silhouette},
                {"inverse_davies_bouldin", report.vote_davies_bouldin},
                {"dunn", report.vote_dunn}};
  j["recommended_k"] = report.recommended_k;
  j["elbow"] = "distortion curve reported for visual inspection; not part of the vote";
  return j.dump(2) + "\n";
}

}  // namespace dopclust
