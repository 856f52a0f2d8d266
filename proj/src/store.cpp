#include "roundtable/store.hpp"

#include <algorithm>
#include <filesystem>

#include "roundtable/csv.hpp"
#include "roundtable/error.hpp"

namespace rtb::store {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const engine::Transcript& t) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["discussion_id"] = t.discussion_id;
  doc["item_id"] = t.item_id;
  doc["prompt_index"] = t.prompt_index;
  doc["start_agent_index"] = t.start_agent_index;
  doc["rounds"] = t.rounds;
  doc["incomplete"] = t.incomplete;
  doc["agents"] = json::array();
  for (const auto& agent : t.agents) {
    doc["agents"].push_back({{"agent_id", agent.agent_id}, {"model_name", agent.model_name}});
  }
  doc["utterances"] = json::array();
  for (const auto& u : t.utterances) {
    doc["utterances"].push_back({{"agent_id", u.agent_id},
                                 {"phase", phase_name(u.phase)},
                                 {"round", u.round},
                                 {"raw_text", u.raw_text},
                                 {"summary", u.summary}});
  }
  doc["final_codes"] = json::object();
  for (const auto& [agent_id, text] : t.final_codes) {
    doc["final_codes"][agent_id] = text;
  }
  return doc;
}

namespace {

const json& require(const json& doc, const char* key, json::value_t type,
                    const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    fail("parse_error", where + ": missing key '" + key + "'");
  }
  bool ok = it->type() == type ||
            (type == json::value_t::number_integer && it->is_number_integer()) ||
            (type == json::value_t::object && it->is_object()) ||
            (type == json::value_t::array && it->is_array());
  if (!ok) {
    fail("parse_error", where + ": key '" + key + "' has the wrong type");
  }
  return *it;
}

}  // namespace

engine::Transcript from_json(const json& doc) {
  if (!doc.is_object()) fail("parse_error", "transcript: document is not an object");
  const std::string where = "transcript";

  int version = require(doc, "schema_version", json::value_t::number_integer, where).get<int>();
  if (version != kSchemaVersion) {
    fail("parse_error", where + ": unsupported schema_version " + std::to_string(version));
  }

  engine::Transcript t;
  t.discussion_id = require(doc, "discussion_id", json::value_t::string, where).get<std::string>();
  t.item_id = require(doc, "item_id", json::value_t::string, where).get<std::string>();
  t.prompt_index = require(doc, "prompt_index", json::value_t::number_integer, where).get<int>();
  t.start_agent_index =
      require(doc, "start_agent_index", json::value_t::number_integer, where).get<int>();
  t.rounds = require(doc, "rounds", json::value_t::number_integer, where).get<int>();
  t.incomplete = require(doc, "incomplete", json::value_t::boolean, where).get<bool>();

  for (const auto& agent : require(doc, "agents", json::value_t::array, where)) {
    engine::AgentRef ref;
    ref.agent_id = require(agent, "agent_id", json::value_t::string, where).get<std::string>();
    ref.model_name =
        require(agent, "model_name", json::value_t::string, where).get<std::string>();
    t.agents.push_back(std::move(ref));
  }
  for (const auto& item : require(doc, "utterances", json::value_t::array, where)) {
    Utterance u;
    u.agent_id = require(item, "agent_id", json::value_t::string, where).get<std::string>();
    u.phase = phase_from_name(
        require(item, "phase", json::value_t::string, where).get<std::string>());
    u.round = require(item, "round", json::value_t::number_integer, where).get<int>();
    u.raw_text = require(item, "raw_text", json::value_t::string, where).get<std::string>();
    u.summary = require(item, "summary", json::value_t::string, where).get<std::string>();
    t.utterances.push_back(std::move(u));
  }
  for (const auto& [agent_id, text] : require(doc, "final_codes", json::value_t::object,
                                              where).items()) {
    if (!text.is_string()) fail("parse_error", where + ": final_codes values must be strings");
    t.final_codes[agent_id] = text.get<std::string>();
  }

  if (!t.incomplete) {
    engine::validate_transcript(t);
  }
  return t;
}

std::string save_transcript(const engine::Transcript& t, const std::string& dir) {
  // replace: raw bytes outside UTF-8 still serialize (as U+FFFD) rather than throw.
  std::string payload =
      to_json(t).dump(2, ' ', false, nlohmann::json::error_handler_t::replace);
  payload.push_back('\n');
  fs::path path = fs::path(dir) / (t.discussion_id + ".json");
  csv::write_file_atomic(path.string(), payload);
  return path.string();
}

LoadResult load_transcripts(const std::string& dir, bool include_incomplete,
                            const TranscriptFilter& filter) {
  fs::path root(dir);
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    fail("io_error", "not a readable directory: " + dir);
  }

  std::vector<std::string> paths;
  for (auto it = fs::recursive_directory_iterator(root, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) fail("io_error", "failed scanning directory: " + dir);
    if (!it->is_regular_file()) continue;
    const fs::path& p = it->path();
    if (p.extension() != ".json") continue;
    std::string name = p.filename().string();
    if (name == "run_report.json" || name == "manifest.json") continue;
    paths.push_back(p.string());
  }
  std::sort(paths.begin(), paths.end());

  LoadResult result;
  for (const auto& path : paths) {
    try {
      json doc = json::parse(csv::slurp_file(path));
      engine::Transcript t = from_json(doc);
      if (t.incomplete && !include_incomplete) continue;
      if (filter && !filter(t)) continue;
      result.transcripts.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({path, std::string("invalid JSON: ") + e.what()});
    } catch (const Error& e) {
      result.errors.push_back({path, e.what()});
    }
  }
  return result;
}

}  // namespace rtb::store
