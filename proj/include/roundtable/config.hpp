#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roundtable/backends.hpp"
#include "roundtable/engine.hpp"
#include "roundtable/ingest.hpp"

namespace rtb::config {

// The five built-in coding task prompts, rotated over items.
std::vector<std::string> default_prompts();

enum class BackendMode { scripted, http };

struct DatasetConfig {
  std::string path;
  std::string text_column = "text";
  std::optional<std::string> score_column;
  std::optional<std::string> id_column;
  char delimiter = ',';
  std::size_t min_words = 0;
  std::optional<double> min_score;
  std::optional<std::size_t> sample_n;
  ingest::SampleMode sample_mode = ingest::SampleMode::uniform;
};

struct RunConfig {
  BackendMode backend = BackendMode::scripted;
  std::string scripted_plans_path;  // required for scripted runs
  std::vector<backends::AgentSpec> agents;
  std::vector<int> group_sizes;   // k values; prefixes of `agents`
  std::vector<int> round_counts;  // R values
  std::vector<std::string> prompts = default_prompts();
  std::optional<DatasetConfig> dataset;
  std::vector<ingest::CommentRecord> inline_items;  // alternative to `dataset`
  std::uint64_t seed = 0;
  engine::StartRotation start_rotation = engine::StartRotation::randomized;
  std::string output_dir = "out";
  std::size_t workers = 0;  // 0 = hardware concurrency
  backends::RetryPolicy retry;
  std::string summary_instruction =
      "Summarize your previous statement in one sentence.";
};

// Loads and validates a run configuration from JSON. API keys are never read
// from the file; agents name the environment variable that holds them
// (`api_key_env`). Throws io_error / parse_error / invalid_argument.
RunConfig load_run_config(const std::string& path);

// Expands the (group_sizes x round_counts) grid into per-cell simulation
// configs over `items`, taking the first k agents for each group size.
std::vector<engine::SimulationConfig> expand_grid(const RunConfig& config,
                                                  const ingest::ItemSet& items);

}  // namespace rtb::config
