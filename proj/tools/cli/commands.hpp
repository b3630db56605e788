#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "dopclust/data.hpp"

namespace dopclust::cli {

// Per-stage seeds split from the root seed.
nlohmann::ordered_json stage_seeds(const PipelineConfig& config);

// Loads config.data_path, or generates the synthetic dataset when it is empty.
Dataset load_input(const PipelineConfig& config);

void cmd_sweep(const PipelineConfig& config, std::ostream& log);
void cmd_evaluate(const PipelineConfig& config, std::ostream& log);
void cmd_embed(const PipelineConfig& config, std::ostream& log);
void cmd_synth(const PipelineConfig& config, std::ostream& log);

// Full command-line entry point; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dopclust::cli
