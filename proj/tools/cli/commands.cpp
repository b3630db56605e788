#include "cli/commands.hpp"

#include <filesystem>

#include "dopclust/evaluation.hpp"
#include "dopclust/io.hpp"
#include "dopclust/manifold.hpp"
#include "dopclust/random.hpp"
#include "dopclust/validity.hpp"

namespace dopclust::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

json stage_seeds(const PipelineConfig& config) {
  json s;
  s["sweep"] = derive_seed(config.seed, "sweep");
  s["evaluate"] = derive_seed(config.seed, "evaluate");
  s["embed"] = derive_seed(config.seed, "embed");
  return s;
}

Dataset load_input(const PipelineConfig& config) {
  if (config.data_path.empty()) return generate_synthetic(config.synthetic);
  if (!fs::exists(config.data_path)) throw ConfigError("dataset not found: " + config.data_path);
  return load_dataset(config.data_path, config.layout);
}

namespace {

void write_provenance(const std::string& command, const PipelineConfig& config) {
  json p;
  p["command"] = command;
  p["config"] = config_to_json(config);
  p["stage_seeds"] = stage_seeds(config);
  io::write_text_file(fs::path(config.output) / "provenance.json", p.dump(2) + "\n");
}

int selection_k(const PipelineConfig& config) { return config.k.value_or(config.selection_k); }

// Features for all samples; the extractor is fitted without labels.
Matrix extract_all(const PipelineConfig& config, ExtractorKind kind, const Dataset& ds, std::uint64_t seed) {
  ClustererConfig selection = config.clusterer_config(ClusterMethod::kmeans, seed);
  selection.k = selection_k(config);
  const auto images = ds.images();
  return fit_extractor(config.extractor_config(kind), images, selection).transform(images);
}

KSweepReport run_sweep(const PipelineConfig& config, const Dataset& ds, std::ostream& log) {
  const std::uint64_t seed = derive_seed(config.seed, "sweep");
  const ExtractorKind kind = config.extractors.front();
  log << "sweep: extracting " << to_string(kind) << " features for " << ds.size() << " samples\n";
  const Matrix features = extract_all(config, kind, ds, derive_seed(seed, "extractor"));
  log << "sweep: K = " << config.k_min << ".." << config.k_max << "\n";
  const auto report = sweep_k(features, config.k_range(), config.clusterer_config(ClusterMethod::kmeans,
                                                                                   derive_seed(seed, "clusterer")));
  io::write_text_file(fs::path(config.output) / "ksweep.csv", ksweep_to_csv(report));
  io::write_text_file(fs::path(config.output) / "ksweep.json", ksweep_to_json(report) + "\n");
  log << "sweep: recommended K = " << report.recommended_k << "\n";
  return report;
}

}  // namespace

void cmd_sweep(const PipelineConfig& config, std::ostream& log) {
  const Dataset ds = load_input(config);
  write_provenance("sweep", config);
  run_sweep(config, ds, log);
}

void cmd_evaluate(const PipelineConfig& config, std::ostream& log) {
  const Dataset ds = load_input(config);
  write_provenance("evaluate", config);
  int k = config.k.value_or(0);
  if (!config.k) k = run_sweep(config, ds, log).recommended_k;

  const std::uint64_t seed = derive_seed(config.seed, "evaluate");
  std::vector<ExperimentReport> reports;
  for (auto kind : config.extractors) {
    for (auto method : config.clusterers) {
      log << "evaluate: " << to_string(kind) << " + " << to_string(method) << " (K = " << k << ")\n";
      ClustererConfig clusterer = config.clusterer_config(method, seed);
      clusterer.k = k;
      reports.push_back(run_experiment(ds, config.extractor_config(kind), clusterer, seed));
      const auto& r = reports.back();
      log << "  test accuracy " << io::format_double(r.mean_test_accuracy) << " +- "
          << io::format_double(r.std_test_accuracy) << "\n";
      for (const auto& fold : r.folds) {
        const std::string name = "confusion_" + r.extractor + "_" + r.clusterer + "_subject" +
                                 std::to_string(fold.held_out_subject) + ".csv";
        io::write_text_file(fs::path(config.output) / name, confusion_to_csv(fold.confusion));
      }
    }
  }
  io::write_text_file(fs::path(config.output) / "report.json", reports_to_json(reports) + "\n");
  io::write_text_file(fs::path(config.output) / "summary.md", summary_markdown(reports));
}

void cmd_embed(const PipelineConfig& config, std::ostream& log) {
  const Dataset ds = load_input(config);
  write_provenance("embed", config);
  const std::uint64_t seed = derive_seed(config.seed, "embed");

  std::vector<int> labels;
  if (ds.has_labels()) {
    for (const auto& s : ds.samples()) labels.push_back(*s.label());
  }
  for (auto kind : config.extractors) {
    log << "embed: extracting " << to_string(kind) << " features\n";
    const Matrix features = extract_all(config, kind, ds, derive_seed(seed, "extractor"));
    for (auto method : config.embed_methods) {
      const std::uint64_t method_seed = derive_seed(seed, to_string(method));
      log << "embed: " << to_string(method) << " on " << features.rows() << " x " << features.cols() << "\n";
      Embedding e;
      switch (method) {
        case EmbedMethod::tsne: {
          TsneOptions o = config.tsne;
          o.seed = method_seed;
          e = tsne(features, o);
          break;
        }
        case EmbedMethod::mds: {
          MdsOptions o = config.mds;
          o.seed = method_seed;
          e = mds(features, o);
          break;
        }
        case EmbedMethod::lle:
          e = lle(features, config.lle);
          break;
      }
      const std::string name =
          "embedding_" + std::string(to_string(method)) + "_" + std::string(to_string(kind)) + ".csv";
      io::write_text_file(fs::path(config.output) / name, embedding_to_csv(e, labels.empty() ? nullptr : &labels));
      log << "  final loss " << io::format_double(e.final_loss) << "\n";
    }
  }
}

void cmd_synth(const PipelineConfig& config, std::ostream& log) {
  const Dataset ds = generate_synthetic(config.synthetic);
  write_provenance("synth", config);
  const fs::path path = fs::path(config.output) / "dataset.csv";
  save_dataset(path, ds, config.layout);
  log << "synth: wrote " << ds.size() << " samples to " << path.string() << "\n";
}

}  // namespace dopclust::cli
