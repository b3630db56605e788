#include "dopclust/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "dopclust/io.hpp"
#include "dopclust/parallel.hpp"
#include "dopclust/random.hpp"

namespace dopclust {

std::vector<Fold> loocv_split(const Dataset& ds) {
  const auto subjects = ds.subjects();
  if (subjects.size() < 2) throw InvalidArgument("loocv_split: need at least 2 subjects, got " + std::to_string(subjects.size()));
  std::vector<Fold> folds;
  folds.reserve(subjects.size());
  for (int subject : subjects) {
    Fold fold;
    fold.held_out_subject = subject;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      (ds[i].subject_id() == subject ? fold.test : fold.train).push_back(i);
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

FeatureFitter make_feature_fitter(const ExtractorConfig& extractor, const ClustererConfig& clusterer) {
  return [extractor, clusterer](const std::vector<Matrix>& train_images, std::uint64_t seed) -> FeatureMap {
    ClustererConfig selection = clusterer;
    selection.method = ClusterMethod::kmeans;
    selection.seed = seed;
    auto fitted = std::make_shared<const FittedExtractor>(fit_extractor(extractor, train_images, selection));
    return {[fitted](const std::vector<Matrix>& images) { return fitted->transform(images); }, fitted->describe()};
  };
}

namespace {

std::vector<Matrix> images_of(const Dataset& ds, const std::vector<std::size_t>& idx) {
  std::vector<Matrix> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(ds[i].image());
  return out;
}

Labels labels_of(const Labels& all, const std::vector<std::size_t>& idx) {
  Labels out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

int resolve_k(const Dataset& ds, const ClustererConfig& clusterer) {
  return clusterer.k > 0 ? clusterer.k : ds.activity_count();
}

ExperimentReport run_folds(const Dataset& ds, const FeatureFitter& fitter, const ClustererConfig& clusterer,
                           std::uint64_t seed, std::string extractor_name) {
  if (!ds.has_labels()) throw DataError("run_experiment: dataset has no labels to evaluate against");
  const Labels truth = ds.class_indices();
  const int k = resolve_k(ds, clusterer);
  const int match_k = std::max(k, ds.activity_count());
  const auto folds = loocv_split(ds);

  ExperimentReport report;
  report.extractor = std::move(extractor_name);
  report.clusterer = std::string(to_string(clusterer.method));
  report.seed = seed;
  report.k = k;
  report.folds.resize(folds.size());

  parallel_for(folds.size(), [&](std::size_t f) {
    const Fold& fold = folds[f];
    FoldResult& result = report.folds[f];
    result.held_out_subject = fold.held_out_subject;
    try {
      const auto fold_seed = derive_seed(seed, static_cast<std::uint64_t>(fold.held_out_subject));
      const auto train_images = images_of(ds, fold.train);
      const auto test_images = images_of(ds, fold.test);

      // Feature fitting and clustering see images only.
      const FeatureMap features = fitter(train_images, derive_seed(fold_seed, "extractor"));
      const Matrix z_train = features.transform(train_images);
      const Matrix z_test = features.transform(test_images);

      ClustererConfig cfg = clusterer;
      cfg.k = k;
      cfg.seed = derive_seed(fold_seed, "clusterer");
      const ClusterModel model = fit(z_train, cfg);
      const Labels test_clusters = assign(model, z_test);

      const Labels train_truth = labels_of(truth, fold.train);
      const Labels test_truth = labels_of(truth, fold.test);
      result.mapping = match_labels(model.labels, train_truth, match_k);
      result.train_accuracy = accuracy_and_confusion(model.labels, train_truth, result.mapping).accuracy;
      auto test = accuracy_and_confusion(test_clusters, test_truth, result.mapping);
      result.test_accuracy = test.accuracy;
      result.confusion = std::move(test.confusion);
      result.test_clusters = test_clusters;
      result.train_objective = model.objective;
      result.extractor_json = features.description;
    } catch (const Error& e) {
      throw Error("fold holding out subject " + std::to_string(fold.held_out_subject) + ": " + e.what());
    }
  });

  std::vector<double> train_acc;
  std::vector<double> test_acc;
  for (const auto& f : report.folds) {
    train_acc.push_back(f.train_accuracy);
    test_acc.push_back(f.test_accuracy);
  }
  std::tie(report.mean_train_accuracy, report.std_train_accuracy) = mean_and_std(train_acc);
  std::tie(report.mean_test_accuracy, report.std_test_accuracy) = mean_and_std(test_acc);
  return report;
}

}  // namespace

ExperimentReport run_experiment_with(const Dataset& ds, const FeatureFitter& fitter, const ClustererConfig& clusterer,
                                     std::uint64_t seed, std::string extractor_name) {
  return run_folds(ds, fitter, clusterer, seed, std::move(extractor_name));
}

ExperimentReport run_experiment(const Dataset& ds, const ExtractorConfig& extractor, const ClustererConfig& clusterer,
                                std::uint64_t seed) {
  ClustererConfig resolved = clusterer;
  resolved.k = resolve_k(ds, clusterer);
  return run_folds(ds, make_feature_fitter(extractor, resolved), resolved, seed, std::string(to_string(extractor.kind)));
}

// ---------------------------------------------------------------------------
// Reports

namespace {

nlohmann::ordered_json counts_json(const CountMatrix& m) {
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::ordered_json report_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["extractor"] = report.extractor;
  j["clusterer"] = report.clusterer;
  j["seed"] = report.seed;
  j["k"] = report.k;
  j["mean_train_accuracy"] = report.mean_train_accuracy;
  j["std_train_accuracy"] = report.std_train_accuracy;
  j["mean_test_accuracy"] = report.mean_test_accuracy;
  j["std_test_accuracy"] = report.std_test_accuracy;
  auto folds = nlohmann::ordered_json::array();
  for (const auto& f : report.folds) {
    nlohmann::ordered_json fj;
    fj["held_out_subject"] = f.held_out_subject;
    fj["train_accuracy"] = f.train_accuracy;
    fj["test_accuracy"] = f.test_accuracy;
    fj["train_objective"] = f.train_objective;
    fj["mapping"] = f.mapping;
    fj["confusion"] = counts_json(f.confusion);
    fj["test_clusters"] = f.test_clusters;
    fj["extractor_state"] =
        f.extractor_json.empty() ? nlohmann::ordered_json::object() : nlohmann::ordered_json::parse(f.extractor_json);
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  return j;
}

std::string percent_cell(double mean, double stddev) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f%% ± %.2f", 100.0 * mean, 100.0 * stddev);
  return buf;
}

std::string display_name(const std::string& clusterer) {
  if (clusterer == "kmeans") return "K-Means";
  if (clusterer == "kmedoids") return "K-Medoids";
  return clusterer;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) { return report_json(report).dump(2) + "\n"; }

std::string reports_to_json(std::span<const ExperimentReport> reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  nlohmann::ordered_json j;
  j["experiments"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string confusion_to_csv(const CountMatrix& confusion) {
  std::string out = "true\\predicted";
  for (Eigen::Index c = 0; c < confusion.cols(); ++c) out += "," + std::to_string(c + 1);
  out += '\n';
  for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
    out += std::to_string(r + 1);
    for (Eigen::Index c = 0; c < confusion.cols(); ++c) out += "," + std::to_string(confusion(r, c));
    out += '\n';
  }
  return out;
}

std::string summary_markdown(std::span<const ExperimentReport> reports) {
  std::vector<std::string> extractors;
  std::vector<std::string> clusterers;
  std::map<std::pair<std::string, std::string>, const ExperimentReport*> cell;
  for (const auto& r : reports) {
    if (std::find(extractors.begin(), extractors.end(), r.extractor) == extractors.end()) extractors.push_back(r.extractor);
    if (std::find(clusterers.begin(), clusterers.end(), r.clusterer) == clusterers.end()) clusterers.push_back(r.clusterer);
    cell[{r.clusterer, r.extractor}] = &r;
  }

  auto table = [&](bool test) {
    std::string out = "| Clusterer |";
    for (const auto& e : extractors) out += " " + e + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < extractors.size(); ++i) out += "---|";
    out += '\n';
    for (const auto& c : clusterers) {
      out += "| " + display_name(c) + " |";
      for (const auto& e : extractors) {
        auto it = cell.find({c, e});
        if (it == cell.end()) {
          out += " - |";
        } else if (test) {
          out += " " + percent_cell(it->second->mean_test_accuracy, it->second->std_test_accuracy) + " |";
        } else {
          out += " " + percent_cell(it->second->mean_train_accuracy, it->second->std_train_accuracy) + " |";
        }
      }
      out += '\n';
    }
    return out;
  };

  std::string md = "# Leave-one-subject-out clustering accuracy\n\n";
  md += "Average testing accuracies with standard deviations over " +
        std::to_string(reports.empty() ? 0 : reports.front().folds.size()) + " folds.\n\n";
  md += table(true);
  md += "\nAverage training accuracies with standard deviations.\n\n";
  md += table(false);
  return md;
}

}  // namespace dopclust
