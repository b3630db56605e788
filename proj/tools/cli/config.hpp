#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dopclust/clustering.hpp"
#include "dopclust/common.hpp"
#include "dopclust/data.hpp"
#include "dopclust/features.hpp"
#include "dopclust/manifold.hpp"

namespace dopclust::cli {

// Bad flags, bad config values, missing inputs. Maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct PipelineConfig {
  std::uint64_t seed = 42;
  std::string output = "out";

  std::string data_path;  // empty: generate from `synthetic`
  Layout layout = Layout::vector6400;
  SynthConfig synthetic;

  std::vector<ExtractorKind> extractors = {ExtractorKind::local_dct};
  std::vector<int> dct_patch_sizes = {10, 20, 40, 80};
  std::optional<DctPatchPlan> fixed_plan;
  std::optional<EntropyStrategyId> entropy_strategy;
  int entropy_bins = 32;
  double variance_target = 0.95;

  std::vector<ClusterMethod> clusterers = {ClusterMethod::kmedoids};
  std::optional<int> k;  // nullopt means "auto"
  int k_min = 2;
  int k_max = 10;
  int selection_k = 5;  // K used for Dunn-driven selection when k is auto
  int n_init = 10;
  int max_iter = 300;
  double tol = 1e-6;

  std::vector<EmbedMethod> embed_methods = {EmbedMethod::tsne};
  TsneOptions tsne;
  MdsOptions mds;
  LleOptions lle;

  ExtractorConfig extractor_config(ExtractorKind kind) const;
  ClustererConfig clusterer_config(ClusterMethod method, std::uint64_t stage_seed) const;
  std::vector<int> k_range() const;
};

nlohmann::ordered_json config_to_json(const PipelineConfig& config);

// Unknown keys and invalid values throw ConfigError. Accepts either a config
// object or a provenance document (whose "config" member is used).
PipelineConfig config_from_json(const nlohmann::ordered_json& j);

// TOML unless the file starts with '{' (JSON).
nlohmann::ordered_json read_config_file(const std::filesystem::path& path);

}  // namespace dopclust::cli
