#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/toml_lite.hpp"

using namespace dopclust;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dopclust_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("TOML subset") {
  const auto j = cli::parse_toml(R"(seed = 7
k = "auto"
[extractor]
names = ["local_dct",
  "pca"]  # comment
variance_target = 0.9
[embed]
perplexity = 5.0
)");
  CHECK(j["seed"] == 7);
  CHECK(j["k"] == "auto");
  CHECK(j["extractor"]["names"][1] == "pca");
  CHECK(j["extractor"]["variance_target"] == 0.9);
  CHECK(j["embed"]["perplexity"] == 5.0);
  CHECK_THROWS_AS(cli::parse_toml("a = {b = 1}"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_toml("[[x]]"), cli::ConfigError);
}

TEST_CASE("config round trip and strictness") {
  cli::PipelineConfig config;
  config.seed = 99;
  config.k = 4;
  const auto j = cli::config_to_json(config);
  const cli::PipelineConfig back = cli::config_from_json(j);
  CHECK(cli::config_to_json(back) == j);

  nlohmann::ordered_json bad = j;
  bad["mystery"] = 1;
  CHECK_THROWS_AS(cli::config_from_json(bad), cli::ConfigError);
  bad = j;
  bad["k_min"] = 12;
  CHECK_THROWS_AS(cli::config_from_json(bad), cli::ConfigError);

  nlohmann::ordered_json provenance;
  provenance["command"] = "sweep";
  provenance["config"] = j;
  CHECK(cli::config_to_json(cli::config_from_json(provenance)) == j);
}

TEST_CASE("exit codes") {
  std::string err;
  CHECK(run({}, &err) == 2);
  CHECK(run({"sweep", "--data", "/nonexistent/x.csv"}, &err) == 2);
  CHECK(err.find("/nonexistent/x.csv") != std::string::npos);
  CHECK(run({"sweep", "-e", "wavelet"}, &err) == 2);
  CHECK(err.find("local_dct") != std::string::npos);
  CHECK(run({"sweep", "--bogus"}, &err) == 2);
}

TEST_CASE("synth, sweep and embed write their outputs") {
  const fs::path dir = scratch("pipeline");
  const std::string out = dir.string();
  REQUIRE(run({"synth", "--subjects", "2", "--reps", "3", "--activities", "3", "-o", out}) == 0);
  CHECK(fs::exists(dir / "dataset.csv"));
  CHECK(fs::exists(dir / "provenance.json"));

  const std::string data = (dir / "dataset.csv").string();
  const fs::path sweep = dir / "sweep";
  REQUIRE(run({"sweep", "--data", data, "-e", "raw_dct", "--k-min", "2", "--k-max", "3", "-o", sweep.string()}) == 0);
  const std::string csv = slurp(sweep / "ksweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(fs::exists(sweep / "ksweep.json"));

  const fs::path embed = dir / "embed";
  REQUIRE(run({"embed", "--data", data, "-e", "raw", "-m", "mds", "-o", embed.string()}) == 0);
  const std::string emb = slurp(embed / "embedding_mds_raw.csv");
  CHECK(emb.rfind("sample,x,y,label\n", 0) == 0);
  CHECK(std::count(emb.begin(), emb.end(), '\n') == 19);

  std::string err;
  CHECK(run({"embed", "--data", data, "-e", "raw", "-m", "tsne", "--perplexity", "50", "-o", embed.string()}, &err) ==
        1);
  fs::remove_all(dir);
}
