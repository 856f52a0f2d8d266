#include <cctype>
#include <cmath>

#include <json.hpp>

#include "roundtable/backends.hpp"
#include "roundtable/csv.hpp"
#include "roundtable/error.hpp"
#include "roundtable/hash.hpp"

namespace rtb::backends {

std::string turn_key(const TurnContext& turn) {
  switch (turn.phase) {
    case Phase::initial:
      return "initial";
    case Phase::refinement:
      return "round_" + std::to_string(turn.round);
    case Phase::synthesis:
      return "synthesis";
  }
  return "initial";
}

std::string first_sentence(const std::string& text) {
  auto trim = [](const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t end = i + 1;
      while (end < text.size() &&
             (text[end] == '"' || text[end] == '\'' || text[end] == ')' ||
              text[end] == ']')) {
        ++end;
      }
      return trim(text.substr(0, end));
    }
  }
  return trim(text);
}

ScriptedChatBackend::ScriptedChatBackend(std::map<std::string, ScriptedPlan> plans)
    : plans_(std::move(plans)) {}

ScriptedChatBackend ScriptedChatBackend::from_file(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(csv::slurp_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail("parse_error", "plan file " + path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("agents") || !doc["agents"].is_object()) {
    fail("parse_error", "plan file " + path + ": expected top-level object with \"agents\"");
  }
  std::map<std::string, ScriptedPlan> plans;
  for (const auto& [agent_id, body] : doc["agents"].items()) {
    ScriptedPlan plan;
    if (body.contains("summary_rule")) {
      std::string rule = body["summary_rule"].get<std::string>();
      if (rule == "first_sentence") {
        plan.summary_rule = SummaryRule::first_sentence;
      } else if (rule == "echo") {
        plan.summary_rule = SummaryRule::echo;
      } else {
        fail("parse_error", "plan file " + path + ": unknown summary_rule '" + rule + "'");
      }
    }
    if (body.contains("outputs")) {
      for (const auto& [key, value] : body["outputs"].items()) {
        if (!value.is_string()) {
          fail("parse_error", "plan file " + path + ": output '" + key + "' is not a string");
        }
        plan.outputs[key] = value.get<std::string>();
      }
    }
    plans[agent_id] = std::move(plan);
  }
  return ScriptedChatBackend(std::move(plans));
}

std::string ScriptedChatBackend::chat_complete(const AgentSpec& agent,
                                               const std::vector<ChatMessage>&,
                                               const TurnContext& turn) {
  auto plan_it = plans_.find(agent.agent_id);
  if (plan_it == plans_.end()) {
    fail("plan_missing", "no scripted plan for agent '" + agent.agent_id + "'");
  }
  const ScriptedPlan& plan = plan_it->second;
  std::string key = turn_key(turn);
  auto out_it = plan.outputs.find(key);
  if (out_it == plan.outputs.end()) out_it = plan.outputs.find("default");
  if (out_it == plan.outputs.end()) {
    fail("plan_missing",
         "agent '" + agent.agent_id + "' has no output for turn '" + key + "' and no default");
  }
  if (out_it->second.empty()) {
    fail("empty_completion", "agent '" + agent.agent_id + "' scripted an empty output");
  }
  return out_it->second;
}

std::string ScriptedChatBackend::summarize_turn(const AgentSpec& agent, const std::string& text,
                                                const TurnContext&) {
  auto plan_it = plans_.find(agent.agent_id);
  SummaryRule rule =
      plan_it == plans_.end() ? SummaryRule::first_sentence : plan_it->second.summary_rule;
  std::string summary = rule == SummaryRule::echo ? text : first_sentence(text);
  if (summary.empty()) {
    fail("empty_completion", "summary of empty text for agent '" + agent.agent_id + "'");
  }
  return summary;
}

ScriptedEmbeddingBackend::ScriptedEmbeddingBackend(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) fail("invalid_argument", "embedding dimension must be positive");
}

std::string ScriptedEmbeddingBackend::provider_id() const {
  return "scripted-fnv1a-d" + std::to_string(dim_);
}

std::vector<EmbeddingVector> ScriptedEmbeddingBackend::embed(
    const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::string id = provider_id();
  for (const auto& text : texts) {
    // Hash-seeded unit vector: identical text always maps to the identical
    // vector, with no transcendentals so results are bit-stable everywhere.
    SplitMix rng(fnv1a64(id + '\x1f' + text));
    std::vector<double> values(dim_);
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (auto& v : values) {
        v = 2.0 * rng.next_unit() - 1.0;
        norm_sq += v * v;
      }
    } while (norm_sq == 0.0);
    double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& v : values) v *= inv;
    out.push_back(make_embedding(std::move(values), id));
  }
  return out;
}

}  // namespace rtb::backends
