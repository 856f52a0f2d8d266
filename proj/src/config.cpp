#include "roundtable/config.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "roundtable/csv.hpp"
#include "roundtable/error.hpp"

namespace rtb::config {

using nlohmann::json;

std::vector<std::string> default_prompts() {
  return {
      "A code is often a word or short phrase that symbolically assigns a salient, "
      "essence-capturing and/or evocative attribute to a portion of language-based or "
      "visual data. Perform thematic analysis on the following comment and generate a "
      "concise qualitative code.",
      "Summarize the main idea of this sentence in a short, thematic code.",
      "From the perspective of a social scientist, summarize the following sentence as "
      "you would in thematic coding.",
      "Can you tell me what the main idea of this sentence is in just a few words?",
      "If you were a social scientist doing thematic analysis, what code would you give "
      "to this citation?",
  };
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& message) {
  fail("parse_error", "config " + path + ": " + message);
}

backends::AgentSpec parse_agent(const json& doc, const std::string& path) {
  backends::AgentSpec spec;
  if (!doc.is_object() || !doc.contains("agent_id")) {
    bad(path, "every agent needs an agent_id");
  }
  spec.agent_id = doc["agent_id"].get<std::string>();
  spec.model_name = doc.value("model_name", spec.agent_id);
  spec.endpoint = doc.value("endpoint", std::string());
  spec.temperature = doc.value("temperature", 0.0);
  spec.max_tokens = doc.value("max_tokens", 256);
  spec.api_key_env = doc.value("api_key_env", std::string());
  for (const auto& [key, value] : doc.items()) {
    if (key == "api_key" || key == "token" || key == "secret") {
      bad(path, "secrets do not belong in config files; set api_key_env to the name "
                "of an environment variable instead");
    }
    (void)value;
  }
  return spec;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  json doc;
  try {
    doc = json::parse(csv::slurp_file(path));
  } catch (const json::exception& e) {
    bad(path, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad(path, "top level must be an object");

  RunConfig config;

  std::string backend = doc.value("backend", std::string("scripted"));
  if (backend == "scripted") {
    config.backend = BackendMode::scripted;
  } else if (backend == "http") {
    config.backend = BackendMode::http;
  } else {
    bad(path, "backend must be \"scripted\" or \"http\"");
  }
  config.scripted_plans_path = doc.value("scripted_plans", std::string());
  if (config.backend == BackendMode::scripted && config.scripted_plans_path.empty()) {
    bad(path, "scripted backend requires \"scripted_plans\" (path to a plan file)");
  }

  if (!doc.contains("agents") || !doc["agents"].is_array() || doc["agents"].empty()) {
    bad(path, "\"agents\" must be a non-empty array");
  }
  for (const auto& agent : doc["agents"]) {
    config.agents.push_back(parse_agent(agent, path));
  }

  if (doc.contains("group_sizes")) {
    config.group_sizes = doc["group_sizes"].get<std::vector<int>>();
  } else {
    config.group_sizes = {int(config.agents.size())};
  }
  if (doc.contains("round_counts")) {
    config.round_counts = doc["round_counts"].get<std::vector<int>>();
  } else {
    config.round_counts = {1};
  }
  for (int k : config.group_sizes) {
    if (k < 2) bad(path, "group sizes must be >= 2");
    if (std::size_t(k) > config.agents.size()) {
      bad(path, "group size " + std::to_string(k) + " exceeds the configured agents");
    }
  }
  for (int r : config.round_counts) {
    if (r < 1) bad(path, "round counts must be >= 1");
  }
  if (config.group_sizes.empty() || config.round_counts.empty()) {
    bad(path, "group_sizes and round_counts must be non-empty");
  }

  if (doc.contains("prompts")) {
    config.prompts = doc["prompts"].get<std::vector<std::string>>();
    if (config.prompts.empty()) bad(path, "\"prompts\" must not be empty when given");
  }

  if (doc.contains("dataset")) {
    const json& d = doc["dataset"];
    DatasetConfig dataset;
    if (!d.contains("path")) bad(path, "dataset needs a \"path\"");
    dataset.path = d["path"].get<std::string>();
    dataset.text_column = d.value("text_column", std::string("text"));
    if (d.contains("score_column")) dataset.score_column = d["score_column"].get<std::string>();
    if (d.contains("id_column")) dataset.id_column = d["id_column"].get<std::string>();
    std::string delimiter = d.value("delimiter", std::string(","));
    if (delimiter.size() != 1) bad(path, "dataset delimiter must be one character");
    dataset.delimiter = delimiter[0];
    dataset.min_words = d.value("min_words", std::size_t(0));
    if (d.contains("min_score")) dataset.min_score = d["min_score"].get<double>();
    if (d.contains("sample_n")) dataset.sample_n = d["sample_n"].get<std::size_t>();
    std::string mode = d.value("sample_mode",
                               dataset.score_column ? std::string("top_score")
                                                    : std::string("uniform"));
    if (mode == "uniform") {
      dataset.sample_mode = ingest::SampleMode::uniform;
    } else if (mode == "top_score") {
      dataset.sample_mode = ingest::SampleMode::top_score;
    } else {
      bad(path, "sample_mode must be \"uniform\" or \"top_score\"");
    }
    config.dataset = std::move(dataset);
  }

  if (doc.contains("items")) {
    if (!doc["items"].is_array()) bad(path, "\"items\" must be an array");
    std::size_t ordinal = 0;
    for (const auto& item : doc["items"]) {
      ++ordinal;
      ingest::CommentRecord record;
      if (item.is_string()) {
        record.text = item.get<std::string>();
        record.id = "item-" + std::to_string(ordinal);
      } else if (item.is_object() && item.contains("text")) {
        record.text = item["text"].get<std::string>();
        record.id = item.value("id", "item-" + std::to_string(ordinal));
        if (item.contains("score")) record.disagreement_score = item["score"].get<double>();
      } else {
        bad(path, "inline items must be strings or objects with \"text\"");
      }
      record.word_count = ingest::count_words(record.text);
      config.inline_items.push_back(std::move(record));
    }
  }
  if (!config.dataset && config.inline_items.empty()) {
    bad(path, "either \"dataset\" or inline \"items\" must be given");
  }
  if (config.dataset && !config.inline_items.empty()) {
    bad(path, "\"dataset\" and inline \"items\" are mutually exclusive");
  }

  config.seed = doc.value("seed", std::uint64_t(0));
  std::string rotation = doc.value("start_rotation", std::string("randomized"));
  if (rotation == "randomized") {
    config.start_rotation = engine::StartRotation::randomized;
  } else if (rotation == "fixed") {
    config.start_rotation = engine::StartRotation::fixed;
  } else {
    bad(path, "start_rotation must be \"randomized\" or \"fixed\"");
  }
  config.output_dir = doc.value("output_dir", std::string("out"));
  config.workers = doc.value("workers", std::size_t(0));
  if (doc.contains("retry")) {
    const json& r = doc["retry"];
    config.retry.max_attempts = r.value("max_attempts", config.retry.max_attempts);
    config.retry.base_delay_ms = r.value("base_delay_ms", config.retry.base_delay_ms);
    config.retry.max_delay_ms = r.value("max_delay_ms", config.retry.max_delay_ms);
    if (config.retry.max_attempts < 1) bad(path, "retry.max_attempts must be >= 1");
  }
  config.summary_instruction = doc.value("summary_instruction", config.summary_instruction);

  std::set<std::string> ids;
  for (const auto& agent : config.agents) {
    if (!ids.insert(agent.agent_id).second) {
      bad(path, "duplicate agent_id '" + agent.agent_id + "'");
    }
  }
  return config;
}

std::vector<engine::SimulationConfig> expand_grid(const RunConfig& config,
                                                  const ingest::ItemSet& items) {
  std::vector<engine::SimulationConfig> grid;
  for (int k : config.group_sizes) {
    for (int rounds : config.round_counts) {
      engine::SimulationConfig cell;
      cell.agents.assign(config.agents.begin(), config.agents.begin() + k);
      cell.rounds = rounds;
      cell.prompts = config.prompts;
      cell.items = items;
      cell.seed = config.seed;
      cell.start_rotation = config.start_rotation;
      grid.push_back(std::move(cell));
    }
  }
  return grid;
}

}  // namespace rtb::config
