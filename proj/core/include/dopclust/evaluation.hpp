#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dopclust/clustering.hpp"
#include "dopclust/data.hpp"
#include "dopclust/features.hpp"
#include "dopclust/matching.hpp"

namespace dopclust {

struct Fold {
  int held_out_subject = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// One fold per subject (ascending ID): test = that subject's samples.
std::vector<Fold> loocv_split(const Dataset& ds);

struct FoldResult {
  int held_out_subject = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  CountMatrix confusion;         // rows: true class, cols: mapped prediction
  std::vector<int> mapping;      // cluster -> class, learned on the training split
  Labels test_clusters;          // raw cluster ids assigned to the test samples
  std::string extractor_json;    // fitted extractor description
  double train_objective = 0.0;
};

struct ExperimentReport {
  std::string extractor;
  std::string clusterer;
  std::uint64_t seed = 0;
  int k = 0;
  std::vector<FoldResult> folds;
  double mean_train_accuracy = 0.0;
  double std_train_accuracy = 0.0;  // population standard deviation
  double mean_test_accuracy = 0.0;
  double std_test_accuracy = 0.0;
};

// A fitted feature transform: images -> one feature row per image.
struct FeatureMap {
  std::function<Matrix(const std::vector<Matrix>& images)> transform;
  std::string description;  // JSON object, may be empty
};
// Fits a feature map on training images. Receives no labels.
using FeatureFitter = std::function<FeatureMap(const std::vector<Matrix>& train_images, std::uint64_t seed)>;

FeatureFitter make_feature_fitter(const ExtractorConfig& extractor, const ClustererConfig& clusterer);

// Leave-one-subject-out experiment. Per fold: fit features and clusterer on
// the training subjects, learn the cluster->class mapping on the training
// split, then apply that mapping to the held-out subject. K defaults to the
// number of classes when clusterer.k <= 0.
ExperimentReport run_experiment(const Dataset& ds, const ExtractorConfig& extractor, const ClustererConfig& clusterer,
                                std::uint64_t seed);

ExperimentReport run_experiment_with(const Dataset& ds, const FeatureFitter& fitter, const ClustererConfig& clusterer,
                                     std::uint64_t seed, std::string extractor_name);

// Mean and population standard deviation.
std::pair<double, double> mean_and_std(std::span<const double> values);

std::string report_to_json(const ExperimentReport& report);
std::string reports_to_json(std::span<const ExperimentReport> reports);
std::string confusion_to_csv(const CountMatrix& confusion);

// Table with one row per clusterer and one column per extractor, cells
// "mean% ± std" of testing accuracy, followed by the same for training.
std::string summary_markdown(std::span<const ExperimentReport> reports);

}  // namespace dopclust
