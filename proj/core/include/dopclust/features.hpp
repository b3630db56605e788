#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dopclust/clustering.hpp"
#include "dopclust/common.hpp"
#include "dopclust/entropy.hpp"
#include "dopclust/pca.hpp"

namespace dopclust {

/// A square, non-overlapping patch of the 80x80 image, split into a 3x3 grid
/// of sub-patches from each of which 6 zig-zag DCT coefficients are kept.
struct DctPatchPlan {
  static constexpr int kSubgrid = 3;
  static constexpr int kCoeffsPerSubpatch = 6;
  static constexpr int kFeatureLength = kSubgrid * kSubgrid * kCoeffsPerSubpatch;  // 54

  int patch_size = 40;
  int patch_index = 0;  // row-major among the (80/patch_size)^2 patches

  int patches_per_side() const;
  int candidate_count() const { return patches_per_side() * patches_per_side(); }
  int row() const;
  int col() const;

  friend bool operator==(const DctPatchPlan&, const DctPatchPlan&) = default;
};

inline constexpr std::array<int, 4> kDctPatchSizes = {10, 20, 40, 80};

bool is_valid_patch_size(int size);

Vector extract_local_dct(const Matrix& image, const DctPatchPlan& plan);
Matrix extract_local_dct(const std::vector<Matrix>& images, const DctPatchPlan& plan);
Matrix extract_entropy_features(const std::vector<Matrix>& images, const EntropyStrategy& strategy);

struct PatchScore {
  DctPatchPlan plan;
  double dunn = 0.0;  // -inf when the index is undefined for this candidate
};

struct DctSelection {
  DctPatchPlan best;
  std::vector<PatchScore> scores;  // in evaluation order: size ascending, then index
};

// Highest Dunn score; ties go to the smaller patch index, then the smaller size.
DctPatchPlan pick_best_plan(const std::vector<PatchScore>& scores);

// Scores every patch of every candidate size by clustering its 54-dim
// features with K-Means (config.k, config.seed, config.n_init) and taking
// Dunn's index. Throws NumericalError if no candidate has a defined index.
DctSelection select_best_dct_patch(const std::vector<Matrix>& train_images, const std::vector<int>& candidate_sizes,
                                   const ClustererConfig& config);

struct StrategyScore {
  EntropyStrategy strategy;
  double dunn = 0.0;
};

struct EntropySelection {
  EntropyStrategy best;
  std::vector<StrategyScore> scores;  // declaration order
};

// Highest Dunn score; ties go to the earlier-declared strategy.
EntropyStrategy pick_best_strategy(const std::vector<StrategyScore>& scores);

EntropySelection select_best_entropy_strategy(const std::vector<Matrix>& train_images, const ClustererConfig& config,
                                              int bins = 32);

// ---------------------------------------------------------------------------
// Extractor pipeline

enum class ExtractorKind {
  local_dct,  // Dunn-selected local patch, 54 DCT coefficients
  raw_dct,    // the whole 80x80 image as a single patch, 54 DCT coefficients
  entropy,    // Dunn-selected entropy patching strategy
  pca,        // PCA on the flattened 6400-vectors
  pca2d,      // 2DPCA on the 80x80 images
  raw,        // flattened 6400-vectors, unchanged
};

std::string_view to_string(ExtractorKind kind);
ExtractorKind parse_extractor(std::string_view name);
const std::vector<std::string>& extractor_names();

struct ExtractorConfig {
  ExtractorKind kind = ExtractorKind::local_dct;
  std::vector<int> dct_patch_sizes = {10, 20, 40, 80};
  std::optional<DctPatchPlan> fixed_plan;              // skip Dunn selection
  std::optional<EntropyStrategyId> fixed_strategy;     // skip Dunn selection
  int entropy_bins = 32;
  double variance_target = 0.95;
};

/// An extractor fitted on training images only; transforms any images.
class FittedExtractor {
 public:
  ExtractorKind kind() const { return kind_; }
  Matrix transform(const std::vector<Matrix>& images) const;
  std::size_t feature_length() const;
  std::vector<std::string> column_names() const;
  // JSON object describing the fitted state (plan, strategy, component count, scores).
  std::string describe() const;

  const std::optional<DctSelection>& dct_selection() const { return dct_selection_; }
  const std::optional<EntropySelection>& entropy_selection() const { return entropy_selection_; }
  const DctPatchPlan& plan() const { return plan_; }
  const EntropyStrategy& strategy() const { return strategy_; }

 private:
  friend FittedExtractor fit_extractor(const ExtractorConfig&, const std::vector<Matrix>&, const ClustererConfig&);

  ExtractorKind kind_ = ExtractorKind::raw;
  DctPatchPlan plan_;
  EntropyStrategy strategy_;
  std::optional<DctSelection> dct_selection_;
  std::optional<EntropySelection> entropy_selection_;
  std::optional<PcaModel> pca_;
  std::optional<Pca2dModel> pca2d_;
};

// selection supplies K and the seed for Dunn-driven patch/strategy selection.
FittedExtractor fit_extractor(const ExtractorConfig& config, const std::vector<Matrix>& train_images,
                              const ClustererConfig& selection);

/// Extracted features with column names and a provenance description.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> columns;
  std::string extractor_json;
  std::uint64_t seed = 0;
};

// Writes <stem>.csv and <stem>.json (sidecar: extractor, plan/strategy, seed).
void write_feature_matrix(const std::string& csv_path, const FeatureMatrix& features);

}  // namespace dopclust
