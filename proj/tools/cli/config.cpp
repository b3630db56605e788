#include "cli/config.hpp"

#include <set>

#include "cli/toml_lite.hpp"
#include "dopclust/entropy.hpp"
#include "dopclust/io.hpp"

namespace dopclust::cli {

using json = nlohmann::ordered_json;

ExtractorConfig PipelineConfig::extractor_config(ExtractorKind kind) const {
  ExtractorConfig c;
  c.kind = kind;
  c.dct_patch_sizes = dct_patch_sizes;
  c.fixed_plan = fixed_plan;
  c.fixed_strategy = entropy_strategy;
  c.entropy_bins = entropy_bins;
  c.variance_target = variance_target;
  return c;
}

ClustererConfig PipelineConfig::clusterer_config(ClusterMethod method, std::uint64_t stage_seed) const {
  ClustererConfig c;
  c.method = method;
  c.k = k.value_or(0);
  c.seed = stage_seed;
  c.max_iter = max_iter;
  c.tol = tol;
  c.n_init = n_init;
  return c;
}

std::vector<int> PipelineConfig::k_range() const {
  std::vector<int> ks;
  for (int k = k_min; k <= k_max; ++k) ks.push_back(k);
  return ks;
}

namespace {

std::string_view layout_name(Layout layout) { return layout == Layout::cube ? "cube" : "vector6400"; }

Layout parse_layout(const std::string& s) {
  if (s == "vector6400") return Layout::vector6400;
  if (s == "cube") return Layout::cube;
  throw ConfigError("unknown dataset layout '" + s + "' (expected vector6400 or cube)");
}

template <class F>
auto wrap(F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ConfigError(where_ + ": expected a table");
  }

  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + prefix() + key + "'");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() || it->is_null() ? nullptr : &*it;
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (const json* v = find(key)) {
      try {
        if constexpr (std::is_same_v<T, double>) {
          if (!v->is_number()) throw ConfigError("");
        } else if constexpr (std::is_integral_v<T>) {
          if (!v->is_number_integer()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!v->is_string()) throw ConfigError("");
        }
        out = v->get<T>();
      } catch (const std::exception&) {
        throw ConfigError("config key '" + prefix() + key + "' has the wrong type");
      }
    }
  }

  std::vector<std::string> names(const std::string& key) {
    std::vector<std::string> out;
    const json* v = find(key);
    if (!v) return out;
    if (v->is_string()) {
      out.push_back(v->get<std::string>());
    } else if (v->is_array()) {
      for (const auto& e : *v) {
        if (!e.is_string()) throw ConfigError("config key '" + prefix() + key + "' must list names");
        out.push_back(e.get<std::string>());
      }
    } else {
      throw ConfigError("config key '" + prefix() + key + "' must be a name or list of names");
    }
    return out;
  }

  std::string prefix() const { return where_.empty() ? "" : where_ + "."; }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

json config_to_json(const PipelineConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["output"] = c.output;
  if (c.k) j["k"] = *c.k;
  else j["k"] = "auto";
  j["k_min"] = c.k_min;
  j["k_max"] = c.k_max;
  j["selection_k"] = c.selection_k;

  json ds;
  ds["path"] = c.data_path;
  ds["layout"] = layout_name(c.layout);
  ds["synthetic"] = {{"n_subjects", c.synthetic.n_subjects},
                     {"reps_per_activity", c.synthetic.reps_per_activity},
                     {"n_activities", c.synthetic.n_activities},
                     {"noise_level", c.synthetic.noise_level},
                     {"seed", c.synthetic.seed}};
  j["dataset"] = ds;

  json ex;
  ex["names"] = json::array();
  for (auto k : c.extractors) ex["names"].push_back(to_string(k));
  ex["dct_patch_sizes"] = c.dct_patch_sizes;
  if (c.fixed_plan) {
    ex["patch_size"] = c.fixed_plan->patch_size;
    ex["patch_index"] = c.fixed_plan->patch_index;
  } else {
    ex["patch_size"] = "auto";
    ex["patch_index"] = 0;
  }
  ex["entropy_strategy"] = c.entropy_strategy ? std::string(to_string(*c.entropy_strategy)) : "auto";
  ex["entropy_bins"] = c.entropy_bins;
  ex["variance_target"] = c.variance_target;
  j["extractor"] = ex;

  json cl;
  cl["methods"] = json::array();
  for (auto m : c.clusterers) cl["methods"].push_back(to_string(m));
  cl["n_init"] = c.n_init;
  cl["max_iter"] = c.max_iter;
  cl["tol"] = c.tol;
  j["clustering"] = cl;

  json em;
  em["methods"] = json::array();
  for (auto m : c.embed_methods) em["methods"].push_back(to_string(m));
  em["perplexity"] = c.tsne.perplexity;
  em["tsne_iterations"] = c.tsne.iterations;
  em["learning_rate"] = c.tsne.learning_rate;
  em["early_exaggeration"] = c.tsne.early_exaggeration;
  em["exaggeration_iters"] = c.tsne.exaggeration_iters;
  em["mds_iterations"] = c.mds.iterations;
  em["mds_random_starts"] = c.mds.random_starts;
  em["mds_tol"] = c.mds.tol;
  em["lle_neighbors"] = c.lle.neighbors;
  em["lle_reg"] = c.lle.reg;
  j["embed"] = em;
  return j;
}

PipelineConfig config_from_json(const json& input) {
  if (input.is_object() && input.contains("config") && input.contains("command")) {
    return config_from_json(input.at("config"));
  }
  PipelineConfig c;
  {
    Reader r(input, "");
    r.get("seed", c.seed);
    r.get("output", c.output);
    if (const json* k = r.find("k")) {
      if (k->is_string() && k->get<std::string>() == "auto") c.k.reset();
      else if (k->is_number_integer()) c.k = k->get<int>();
      else throw ConfigError("config key 'k' must be an integer or \"auto\"");
    }
    r.get("k_min", c.k_min);
    r.get("k_max", c.k_max);
    r.get("selection_k", c.selection_k);

    if (const json* ds = r.find("dataset")) {
      Reader d(*ds, "dataset");
      d.get("path", c.data_path);
      std::string layout(layout_name(c.layout));
      d.get("layout", layout);
      c.layout = parse_layout(layout);
      if (const json* syn = d.find("synthetic")) {
        Reader s(*syn, "dataset.synthetic");
        s.get("n_subjects", c.synthetic.n_subjects);
        s.get("reps_per_activity", c.synthetic.reps_per_activity);
        s.get("n_activities", c.synthetic.n_activities);
        s.get("noise_level", c.synthetic.noise_level);
        s.get("seed", c.synthetic.seed);
      }
    }

    if (const json* ex = r.find("extractor")) {
      Reader e(*ex, "extractor");
      auto names = e.names("names");
      if (!names.empty()) {
        c.extractors.clear();
        for (const auto& n : names) c.extractors.push_back(wrap([&] { return parse_extractor(n); }));
      }
      e.get("dct_patch_sizes", c.dct_patch_sizes);
      int patch_index = 0;
      e.get("patch_index", patch_index);
      if (const json* ps = e.find("patch_size")) {
        if (ps->is_number_integer()) {
          c.fixed_plan = DctPatchPlan{ps->get<int>(), patch_index};
        } else if (!(ps->is_string() && ps->get<std::string>() == "auto")) {
          throw ConfigError("config key 'extractor.patch_size' must be an integer or \"auto\"");
        }
      }
      std::string strategy = "auto";
      e.get("entropy_strategy", strategy);
      if (strategy == "auto") c.entropy_strategy.reset();
      else c.entropy_strategy = wrap([&] { return parse_entropy_strategy(strategy); });
      e.get("entropy_bins", c.entropy_bins);
      e.get("variance_target", c.variance_target);
    }

    if (const json* cl = r.find("clustering")) {
      Reader m(*cl, "clustering");
      auto names = m.names("methods");
      if (!names.empty()) {
        c.clusterers.clear();
        for (const auto& n : names) c.clusterers.push_back(wrap([&] { return parse_cluster_method(n); }));
      }
      m.get("n_init", c.n_init);
      m.get("max_iter", c.max_iter);
      m.get("tol", c.tol);
    }

    if (const json* em = r.find("embed")) {
      Reader e(*em, "embed");
      auto names = e.names("methods");
      if (!names.empty()) {
        c.embed_methods.clear();
        for (const auto& n : names) c.embed_methods.push_back(wrap([&] { return parse_embed_method(n); }));
      }
      e.get("perplexity", c.tsne.perplexity);
      e.get("tsne_iterations", c.tsne.iterations);
      e.get("learning_rate", c.tsne.learning_rate);
      e.get("early_exaggeration", c.tsne.early_exaggeration);
      e.get("exaggeration_iters", c.tsne.exaggeration_iters);
      e.get("mds_iterations", c.mds.iterations);
      e.get("mds_random_starts", c.mds.random_starts);
      e.get("mds_tol", c.mds.tol);
      e.get("lle_neighbors", c.lle.neighbors);
      e.get("lle_reg", c.lle.reg);
    }
  }

  check(!c.output.empty(), "output directory must not be empty");
  check(c.k_min >= 2 && c.k_max >= c.k_min, "k range must satisfy 2 <= k_min <= k_max");
  check(!c.k || *c.k >= 1, "k must be positive or \"auto\"");
  check(c.selection_k >= 2, "selection_k must be >= 2");
  check(c.n_init >= 1 && c.max_iter >= 1 && c.tol >= 0.0, "clustering n_init/max_iter must be >= 1 and tol >= 0");
  check(c.synthetic.n_subjects >= 1 && c.synthetic.reps_per_activity >= 1 && c.synthetic.n_activities >= 1,
        "synthetic dataset dimensions must be positive");
  check(c.synthetic.noise_level >= 0.0, "synthetic noise_level must be >= 0");
  check(!c.extractors.empty() && !c.clusterers.empty() && !c.embed_methods.empty(),
        "extractor, clusterer and embedding lists must not be empty");
  check(!c.dct_patch_sizes.empty(), "extractor.dct_patch_sizes must not be empty");
  for (int s : c.dct_patch_sizes) {
    check(is_valid_patch_size(s), "invalid DCT patch size " + std::to_string(s) + " (expected 10, 20, 40 or 80)");
  }
  if (c.fixed_plan) {
    check(is_valid_patch_size(c.fixed_plan->patch_size),
          "invalid DCT patch size " + std::to_string(c.fixed_plan->patch_size) + " (expected 10, 20, 40 or 80)");
    check(c.fixed_plan->patch_index >= 0 && c.fixed_plan->patch_index < c.fixed_plan->candidate_count(),
          "patch_index out of range for patch size " + std::to_string(c.fixed_plan->patch_size));
  }
  check(c.entropy_bins >= 2, "entropy_bins must be >= 2");
  check(c.variance_target > 0.0 && c.variance_target <= 1.0, "variance_target must be in (0, 1]");
  return c;
}

json read_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  const std::string text = io::read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
  }
  return parse_toml(text);
}

}  // namespace dopclust::cli
