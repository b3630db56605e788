#include "dopclust/features.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "dopclust/data.hpp"
#include "dopclust/dct.hpp"
#include "dopclust/io.hpp"
#include "dopclust/parallel.hpp"
#include "dopclust/validity.hpp"

namespace dopclust {

bool is_valid_patch_size(int size) {
  return std::find(kDctPatchSizes.begin(), kDctPatchSizes.end(), size) != kDctPatchSizes.end();
}

int DctPatchPlan::patches_per_side() const {
  if (!is_valid_patch_size(patch_size)) {
    throw InvalidArgument("invalid DCT patch size " + std::to_string(patch_size) + " (expected 10, 20, 40 or 80)");
  }
  return kImageSide / patch_size;
}

int DctPatchPlan::row() const { return (patch_index / patches_per_side()) * patch_size; }
int DctPatchPlan::col() const { return (patch_index % patches_per_side()) * patch_size; }

namespace {

void check_image(const Matrix& image, const char* who) {
  if (image.rows() != kImageSide || image.cols() != kImageSide) {
    throw InvalidArgument(std::string(who) + ": expected 80x80 image, got " + std::to_string(image.rows()) + "x" +
                          std::to_string(image.cols()));
  }
}

void check_plan(const DctPatchPlan& plan) {
  const int count = plan.candidate_count();
  if (plan.patch_index < 0 || plan.patch_index >= count) {
    throw InvalidArgument("invalid patch index " + std::to_string(plan.patch_index) + " for patch size " +
                          std::to_string(plan.patch_size) + " (valid: 0.." + std::to_string(count - 1) + ")");
  }
}

// Dunn's index of a K-Means partition of the features, -inf when undefined.
double dunn_score(const Matrix& features, const ClustererConfig& config) {
  ClustererConfig cfg = config;
  cfg.method = ClusterMethod::kmeans;
  const ClusterModel model = fit(features, cfg);
  try {
    return dunn(features, model.labels, model.centers);
  } catch (const NumericalError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

void check_selection_input(const std::vector<Matrix>& images, const ClustererConfig& config, const char* who) {
  if (config.k < 2) throw InvalidArgument(std::string(who) + ": K must be >= 2");
  if (images.size() < static_cast<std::size_t>(2 * config.k)) {
    throw InvalidArgument(std::string(who) + ": need at least 2K = " + std::to_string(2 * config.k) +
                          " training images, got " + std::to_string(images.size()));
  }
}

}  // namespace

Vector extract_local_dct(const Matrix& image, const DctPatchPlan& plan) {
  check_image(image, "extract_local_dct");
  check_plan(plan);
  const auto offsets = split_thirds(plan.patch_size);
  Vector out(DctPatchPlan::kFeatureLength);
  Eigen::Index pos = 0;
  for (int sr = 0; sr < DctPatchPlan::kSubgrid; ++sr) {
    for (int sc = 0; sc < DctPatchPlan::kSubgrid; ++sc) {
      const int h = offsets[static_cast<std::size_t>(sr) + 1] - offsets[static_cast<std::size_t>(sr)];
      const int w = offsets[static_cast<std::size_t>(sc) + 1] - offsets[static_cast<std::size_t>(sc)];
      const Matrix sub = image.block(plan.row() + offsets[static_cast<std::size_t>(sr)],
                                     plan.col() + offsets[static_cast<std::size_t>(sc)], h, w);
      out.segment(pos, DctPatchPlan::kCoeffsPerSubpatch) = zigzag_select(dct2(sub), DctPatchPlan::kCoeffsPerSubpatch);
      pos += DctPatchPlan::kCoeffsPerSubpatch;
    }
  }
  return out;
}

Matrix extract_local_dct(const std::vector<Matrix>& images, const DctPatchPlan& plan) {
  Matrix out(static_cast<Eigen::Index>(images.size()), DctPatchPlan::kFeatureLength);
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = extract_local_dct(images[i], plan).transpose();
  }
  return out;
}

Matrix extract_entropy_features(const std::vector<Matrix>& images, const EntropyStrategy& strategy) {
  Matrix out(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(strategy.feature_length()));
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = extract_entropy_features(images[i], strategy).transpose();
  }
  return out;
}

DctPatchPlan pick_best_plan(const std::vector<PatchScore>& scores) {
  if (scores.empty()) throw InvalidArgument("pick_best_plan: no candidates");
  const PatchScore* best = &scores.front();
  for (const auto& s : scores) {
    const bool better = s.dunn > best->dunn;
    const bool tie_wins = s.dunn == best->dunn &&
                          std::pair(s.plan.patch_index, s.plan.patch_size) <
                              std::pair(best->plan.patch_index, best->plan.patch_size);
    if (better || tie_wins) best = &s;
  }
  return best->plan;
}

DctSelection select_best_dct_patch(const std::vector<Matrix>& train_images, const std::vector<int>& candidate_sizes,
                                   const ClustererConfig& config) {
  check_selection_input(train_images, config, "select_best_dct_patch");
  for (const auto& img : train_images) check_image(img, "select_best_dct_patch");

  std::vector<int> sizes = candidate_sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.empty()) throw InvalidArgument("select_best_dct_patch: no candidate sizes");

  DctSelection selection;
  for (int size : sizes) {
    DctPatchPlan plan{size, 0};
    for (int idx = 0; idx < plan.candidate_count(); ++idx) selection.scores.push_back({{size, idx}, 0.0});
  }
  parallel_for(selection.scores.size(), [&](std::size_t i) {
    auto& s = selection.scores[i];
    s.dunn = dunn_score(extract_local_dct(train_images, s.plan), config);
  });

  const bool any_defined = std::any_of(selection.scores.begin(), selection.scores.end(),
                                       [](const PatchScore& s) { return std::isfinite(s.dunn); });
  if (!any_defined) throw NumericalError("select_best_dct_patch: Dunn's index is undefined for every candidate patch");
  selection.best = pick_best_plan(selection.scores);
  return selection;
}

EntropyStrategy pick_best_strategy(const std::vector<StrategyScore>& scores) {
  if (scores.empty()) throw InvalidArgument("pick_best_strategy: no candidates");
  const StrategyScore* best = &scores.front();
  for (const auto& s : scores) {
    if (s.dunn > best->dunn) best = &s;
  }
  return best->strategy;
}

EntropySelection select_best_entropy_strategy(const std::vector<Matrix>& train_images, const ClustererConfig& config,
                                              int bins) {
  check_selection_input(train_images, config, "select_best_entropy_strategy");
  EntropySelection selection;
  for (auto id : kEntropyStrategies) selection.scores.push_back({{id, bins}, 0.0});
  parallel_for(selection.scores.size(), [&](std::size_t i) {
    auto& s = selection.scores[i];
    s.dunn = dunn_score(extract_entropy_features(train_images, s.strategy), config);
  });
  const bool any_defined = std::any_of(selection.scores.begin(), selection.scores.end(),
                                       [](const StrategyScore& s) { return std::isfinite(s.dunn); });
  if (!any_defined) {
    throw NumericalError("select_best_entropy_strategy: Dunn's index is undefined for every strategy");
  }
  selection.best = pick_best_strategy(selection.scores);
  return selection;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ExtractorKind kind) {
  switch (kind) {
    case ExtractorKind::local_dct: return "local_dct";
    case ExtractorKind::raw_dct: return "raw_dct";
    case ExtractorKind::entropy: return "entropy";
    case ExtractorKind::pca: return "pca";
    case ExtractorKind::pca2d: return "pca2d";
    case ExtractorKind::raw: return "raw";
  }
  return "unknown";
}

const std::vector<std::string>& extractor_names() {
  static const std::vector<std::string> names = {"local_dct", "raw_dct", "entropy", "pca", "pca2d", "raw"};
  return names;
}

ExtractorKind parse_extractor(std::string_view name) {
  for (auto kind : {ExtractorKind::local_dct, ExtractorKind::raw_dct, ExtractorKind::entropy, ExtractorKind::pca,
                    ExtractorKind::pca2d, ExtractorKind::raw}) {
    if (to_string(kind) == name) return kind;
  }
  std::string valid;
  for (const auto& n : extractor_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown extractor '" + std::string(name) + "' (valid extractors: " + valid + ")");
}

FittedExtractor fit_extractor(const ExtractorConfig& config, const std::vector<Matrix>& train_images,
                              const ClustererConfig& selection) {
  FittedExtractor fx;
  fx.kind_ = config.kind;
  switch (config.kind) {
    case ExtractorKind::local_dct:
      if (config.fixed_plan) {
        check_plan(*config.fixed_plan);
        fx.plan_ = *config.fixed_plan;
      } else {
        fx.dct_selection_ = select_best_dct_patch(train_images, config.dct_patch_sizes, selection);
        fx.plan_ = fx.dct_selection_->best;
      }
      break;
    case ExtractorKind::raw_dct:
      fx.plan_ = DctPatchPlan{kImageSide, 0};
      break;
    case ExtractorKind::entropy:
      if (config.fixed_strategy) {
        fx.strategy_ = {*config.fixed_strategy, config.entropy_bins};
      } else {
        fx.entropy_selection_ = select_best_entropy_strategy(train_images, selection, config.entropy_bins);
        fx.strategy_ = fx.entropy_selection_->best;
      }
      break;
    case ExtractorKind::pca: {
      Matrix X(static_cast<Eigen::Index>(train_images.size()), kSampleSize);
      for (std::size_t i = 0; i < train_images.size(); ++i) {
        X.row(static_cast<Eigen::Index>(i)) = flatten_image(train_images[i]).transpose();
      }
      fx.pca_ = pca_fit(X, config.variance_target);
      break;
    }
    case ExtractorKind::pca2d:
      fx.pca2d_ = pca2d_fit(train_images, config.variance_target);
      break;
    case ExtractorKind::raw:
      break;
  }
  return fx;
}

Matrix FittedExtractor::transform(const std::vector<Matrix>& images) const {
  const auto n = static_cast<Eigen::Index>(images.size());
  switch (kind_) {
    case ExtractorKind::local_dct:
    case ExtractorKind::raw_dct:
      return extract_local_dct(images, plan_);
    case ExtractorKind::entropy:
      return extract_entropy_features(images, strategy_);
    case ExtractorKind::pca:
    case ExtractorKind::raw: {
      Matrix X(n, kSampleSize);
      for (Eigen::Index i = 0; i < n; ++i) X.row(i) = flatten_image(images[static_cast<std::size_t>(i)]).transpose();
      return kind_ == ExtractorKind::pca ? pca_transform(*pca_, X) : X;
    }
    case ExtractorKind::pca2d: {
      Matrix out(n, static_cast<Eigen::Index>(feature_length()));
      for (Eigen::Index i = 0; i < n; ++i) out.row(i) = pca2d_transform(*pca2d_, images[static_cast<std::size_t>(i)]).transpose();
      return out;
    }
  }
  return {};
}

std::size_t FittedExtractor::feature_length() const {
  switch (kind_) {
    case ExtractorKind::local_dct:
    case ExtractorKind::raw_dct: return DctPatchPlan::kFeatureLength;
    case ExtractorKind::entropy: return strategy_.feature_length();
    case ExtractorKind::pca: return static_cast<std::size_t>(pca_->components());
    case ExtractorKind::pca2d: return static_cast<std::size_t>(pca2d_->mean_image.rows() * pca2d_->components());
    case ExtractorKind::raw: return kSampleSize;
  }
  return 0;
}

std::vector<std::string> FittedExtractor::column_names() const {
  std::vector<std::string> names;
  switch (kind_) {
    case ExtractorKind::local_dct:
    case ExtractorKind::raw_dct:
      for (int sr = 0; sr < DctPatchPlan::kSubgrid; ++sr) {
        for (int sc = 0; sc < DctPatchPlan::kSubgrid; ++sc) {
          for (int c = 0; c < DctPatchPlan::kCoeffsPerSubpatch; ++c) {
            names.push_back("dct_s" + std::to_string(sr) + std::to_string(sc) + "_z" + std::to_string(c));
          }
        }
      }
      break;
    case ExtractorKind::entropy:
      for (std::size_t i = 0; i < strategy_.feature_length(); ++i) names.push_back("entropy_p" + std::to_string(i));
      break;
    case ExtractorKind::pca:
      for (Eigen::Index i = 0; i < pca_->components(); ++i) names.push_back("pc" + std::to_string(i));
      break;
    case ExtractorKind::pca2d:
      for (Eigen::Index c = 0; c < pca2d_->components(); ++c) {
        for (Eigen::Index r = 0; r < pca2d_->mean_image.rows(); ++r) {
          names.push_back("pc" + std::to_string(c) + "_r" + std::to_string(r));
        }
      }
      break;
    case ExtractorKind::raw:
      for (int i = 0; i < kSampleSize; ++i) names.push_back("f" + std::to_string(i));
      break;
  }
  return names;
}

std::string FittedExtractor::describe() const {
  nlohmann::ordered_json j;
  j["extractor"] = to_string(kind_);
  if (kind_ == ExtractorKind::local_dct || kind_ == ExtractorKind::raw_dct) {
    j["patch"] = {{"size", plan_.patch_size}, {"index", plan_.patch_index}, {"row", plan_.row()}, {"col", plan_.col()}};
    if (dct_selection_) {
      auto scores = nlohmann::ordered_json::array();
      for (const auto& s : dct_selection_->scores) {
        scores.push_back({{"size", s.plan.patch_size},
                          {"index", s.plan.patch_index},
                          {"dunn", std::isfinite(s.dunn) ? nlohmann::ordered_json(s.dunn) : nlohmann::ordered_json()}});
      }
      j["selection"] = std::move(scores);
    }
  } else if (kind_ == ExtractorKind::entropy) {
    j["strategy"] = to_string(strategy_.id);
    j["bins"] = strategy_.bins;
    if (entropy_selection_) {
      auto scores = nlohmann::ordered_json::array();
      for (const auto& s : entropy_selection_->scores) {
        scores.push_back({{"strategy", to_string(s.strategy.id)},
                          {"dunn", std::isfinite(s.dunn) ? nlohmann::ordered_json(s.dunn) : nlohmann::ordered_json()}});
      }
      j["selection"] = std::move(scores);
    }
  } else if (kind_ == ExtractorKind::pca) {
    j["components"] = pca_->components();
    j["explained_variance_ratio"] =
        std::vector<double>(pca_->explained_variance_ratio.data(),
                            pca_->explained_variance_ratio.data() + pca_->explained_variance_ratio.size());
  } else if (kind_ == ExtractorKind::pca2d) {
    j["components"] = pca2d_->components();
    j["explained_variance_ratio"] =
        std::vector<double>(pca2d_->explained_variance_ratio.data(),
                            pca2d_->explained_variance_ratio.data() + pca2d_->explained_variance_ratio.size());
  }
  j["feature_length"] = feature_length();
  return j.dump();
}

void write_feature_matrix(const std::string& csv_path, const FeatureMatrix& features) {
  io::write_text_file(csv_path, io::matrix_to_csv(features.values, features.columns));
  std::filesystem::path sidecar(csv_path);
  sidecar.replace_extension(".json");
  nlohmann::ordered_json j;
  j["rows"] = features.values.rows();
  j["cols"] = features.values.cols();
  j["extractor"] = features.extractor_json.empty() ? nlohmann::ordered_json::object()
                                                   : nlohmann::ordered_json::parse(features.extractor_json);
  j["seed"] = features.seed;
  io::write_text_file(sidecar, j.dump(2) + "\n");
}

}  // namespace dopclust
