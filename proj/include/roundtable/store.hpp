#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "roundtable/engine.hpp"

namespace rtb::store {

// Transcript file schema version; bump only with a migration path.
inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const engine::Transcript& transcript);

// Parses and structurally validates one transcript document. Complete
// transcripts must additionally satisfy the utterance-count laws. Throws
// parse_error / invalid_argument.
engine::Transcript from_json(const nlohmann::json& doc);

// Writes `{dir}/{discussion_id}.json` atomically (the discussion id embeds
// the grid-cell slug as a subdirectory). Returns the path written.
std::string save_transcript(const engine::Transcript& transcript, const std::string& dir);

struct LoadError {
  std::string path;
  std::string message;
};

struct LoadResult {
  std::vector<engine::Transcript> transcripts;
  std::vector<LoadError> errors;  // malformed files, collected not thrown
};

using TranscriptFilter = std::function<bool(const engine::Transcript&)>;

// Recursively loads every *.json transcript under `dir` in lexicographic
// path order. Incomplete transcripts are dropped unless `include_incomplete`.
// `run_report.json` and `manifest.json` entries are ignored. Throws io_error
// when `dir` is not a readable directory.
LoadResult load_transcripts(const std::string& dir, bool include_incomplete = false,
                            const TranscriptFilter& filter = nullptr);

}  // namespace rtb::store
