#include <algorithm>
#include <functional>
#include <map>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "dopclust/io.hpp"

namespace dopclust::cli {

namespace {

using json = nlohmann::ordered_json;

struct Flags {
  std::string config;
  std::string data, layout;
  int subjects = 0, reps = 0, activities = 0;
  double noise = 0.0;
  std::uint64_t synth_seed = 0;
  std::vector<std::string> extractors, clusterers, methods;
  std::string k;
  int k_min = 0, k_max = 0;
  std::uint64_t seed = 0;
  std::string out;
  double perplexity = 0.0;
  int iterations = 0, neighbors = 0;
  std::string patch_size;
  int patch_index = 0;
  std::string entropy_strategy;
  int n_init = 0;
};

// Every subcommand accepts the full set of overrides.
void add_flags(CLI::App& cmd, Flags& f, std::map<std::string, CLI::Option*>& opts) {
  opts["config"] = cmd.add_option("-c,--config", f.config, "TOML or JSON config file (or a provenance.json)");
  opts["data"] = cmd.add_option("--data", f.data, "dataset CSV; omit for the synthetic dataset");
  opts["layout"] = cmd.add_option("--layout", f.layout, "dataset layout: vector6400 or cube");
  opts["subjects"] = cmd.add_option("--subjects", f.subjects, "synthetic: number of subjects");
  opts["reps"] = cmd.add_option("--reps", f.reps, "synthetic: repetitions per activity");
  opts["activities"] = cmd.add_option("--activities", f.activities, "synthetic: number of activities");
  opts["noise"] = cmd.add_option("--noise", f.noise, "synthetic: noise level");
  opts["synth_seed"] = cmd.add_option("--synth-seed", f.synth_seed, "synthetic: generator seed");
  opts["extractor"] = cmd.add_option("-e,--extractor", f.extractors, "feature extractor(s)")->delimiter(',');
  opts["clusterer"] = cmd.add_option("--clusterer", f.clusterers, "kmeans and/or kmedoids")->delimiter(',');
  opts["method"] = cmd.add_option("-m,--method", f.methods, "embedding method(s): tsne, mds, lle")->delimiter(',');
  opts["k"] = cmd.add_option("-k,--k", f.k, "number of clusters or 'auto'");
  opts["k_min"] = cmd.add_option("--k-min", f.k_min, "smallest K in the sweep");
  opts["k_max"] = cmd.add_option("--k-max", f.k_max, "largest K in the sweep");
  opts["seed"] = cmd.add_option("-s,--seed", f.seed, "root seed");
  opts["out"] = cmd.add_option("-o,--out", f.out, "output directory");
  opts["perplexity"] = cmd.add_option("--perplexity", f.perplexity, "t-SNE perplexity");
  opts["iterations"] = cmd.add_option("--iterations", f.iterations, "t-SNE iterations");
  opts["neighbors"] = cmd.add_option("--neighbors", f.neighbors, "LLE neighbours");
  opts["patch_size"] = cmd.add_option("--patch-size", f.patch_size, "fixed DCT patch size or 'auto'");
  opts["patch_index"] = cmd.add_option("--patch-index", f.patch_index, "fixed DCT patch index");
  opts["entropy_strategy"] = cmd.add_option("--entropy-strategy", f.entropy_strategy, "entropy patching or 'auto'");
  opts["n_init"] = cmd.add_option("--n-init", f.n_init, "clustering restarts");
}

json overrides(const Flags& f, std::map<std::string, CLI::Option*>& opts) {
  auto given = [&](const char* name) { return opts.at(name)->count() > 0; };
  json o = json::object();
  if (given("data")) o["dataset"]["path"] = f.data;
  if (given("layout")) o["dataset"]["layout"] = f.layout;
  if (given("subjects")) o["dataset"]["synthetic"]["n_subjects"] = f.subjects;
  if (given("reps")) o["dataset"]["synthetic"]["reps_per_activity"] = f.reps;
  if (given("activities")) o["dataset"]["synthetic"]["n_activities"] = f.activities;
  if (given("noise")) o["dataset"]["synthetic"]["noise_level"] = f.noise;
  if (given("synth_seed")) o["dataset"]["synthetic"]["seed"] = f.synth_seed;
  if (given("extractor")) o["extractor"]["names"] = f.extractors;
  if (given("clusterer")) o["clustering"]["methods"] = f.clusterers;
  if (given("method")) o["embed"]["methods"] = f.methods;
  if (given("k")) {
    if (f.k == "auto") {
      o["k"] = "auto";
    } else {
      long long k = 0;
      if (!io::parse_int(f.k, k)) throw ConfigError("--k expects an integer or 'auto', got '" + f.k + "'");
      o["k"] = k;
    }
  }
  if (given("k_min")) o["k_min"] = f.k_min;
  if (given("k_max")) o["k_max"] = f.k_max;
  if (given("seed")) o["seed"] = f.seed;
  if (given("out")) o["output"] = f.out;
  if (given("perplexity")) o["embed"]["perplexity"] = f.perplexity;
  if (given("iterations")) o["embed"]["tsne_iterations"] = f.iterations;
  if (given("neighbors")) o["embed"]["lle_neighbors"] = f.neighbors;
  if (given("patch_size")) {
    long long size = 0;
    if (f.patch_size == "auto") o["extractor"]["patch_size"] = "auto";
    else if (io::parse_int(f.patch_size, size)) o["extractor"]["patch_size"] = size;
    else throw ConfigError("--patch-size expects an integer or 'auto'");
  }
  if (given("patch_index")) o["extractor"]["patch_index"] = f.patch_index;
  if (given("entropy_strategy")) o["extractor"]["entropy_strategy"] = f.entropy_strategy;
  if (given("n_init")) o["clustering"]["n_init"] = f.n_init;
  return o;
}

PipelineConfig resolve(const Flags& f, std::map<std::string, CLI::Option*>& opts) {
  json base = json::object();
  if (!f.config.empty()) {
    base = read_config_file(f.config);
    if (base.is_object() && base.contains("config") && base.contains("command")) base = base["config"];
  }
  base.merge_patch(overrides(f, opts));
  return config_from_json(base);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unsupervised clustering of micro-Doppler spectrograms", "dopclust"};
  app.require_subcommand(1);

  using Command = void (*)(const PipelineConfig&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"sweep", "estimate K with the validity-index sweep", &cmd_sweep},
      {"evaluate", "leave-one-subject-out accuracy for each extractor and clusterer", &cmd_evaluate},
      {"embed", "2-D t-SNE / MDS / LLE embeddings of the extracted features", &cmd_embed},
      {"synth", "write the synthetic dataset", &cmd_synth},
  };
  Flags flags;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  for (const auto& [name, help, _] : commands) add_flags(*app.add_subcommand(name, help), flags, opts[name]);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (const auto& [name, help, command] : commands) {
    if (!app.got_subcommand(name)) continue;
    try {
      const PipelineConfig config = resolve(flags, opts[name]);
      command(config, out);
      return 0;
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}

}  // namespace dopclust::cli
