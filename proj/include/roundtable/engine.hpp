#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roundtable/backends.hpp"
#include "roundtable/core.hpp"
#include "roundtable/ingest.hpp"

namespace rtb::engine {

enum class StartRotation { randomized, fixed };

struct SimulationConfig {
  std::vector<backends::AgentSpec> agents;  // k >= 2, unique agent_ids
  int rounds = 1;                           // R >= 1 refinement rounds
  std::vector<std::string> prompts;         // rotated item_index mod size
  ingest::ItemSet items;
  std::uint64_t seed = 0;
  StartRotation start_rotation = StartRotation::randomized;
};

// Throws invalid_argument when agents < 2, rounds < 1, prompts or items are
// empty, or agent ids repeat.
void validate(const SimulationConfig& config);

// Directory slug for one grid cell, e.g. config_slug(3, 4) == "k3_r4".
std::string config_slug(std::size_t k, int rounds);

// Accumulated one-sentence summaries, oldest first. Grows within a round:
// each speaker sees the summaries of everyone who already spoke this round.
class Memory {
 public:
  struct Entry {
    std::string agent_id;
    int round = 0;
    std::string summary;
  };

  void append(Entry entry) { entries_.push_back(std::move(entry)); }
  const std::vector<Entry>& entries() const { return entries_; }

  // One "agent_id: summary" line per entry.
  std::string render() const;

 private:
  std::vector<Entry> entries_;
};

// User-message text for one turn: task prompt, the comment under analysis,
// and the discussion so far (omitted while memory is empty). The number of
// remaining rounds is never revealed.
std::string assemble_context(const std::string& prompt, const std::string& item_text,
                             const Memory& memory);

struct AgentRef {
  std::string agent_id;
  std::string model_name;
};

struct Transcript {
  std::string discussion_id;
  std::string item_id;
  int prompt_index = 0;
  int start_agent_index = 0;
  std::vector<AgentRef> agents;
  int rounds = 0;  // R
  bool incomplete = false;
  std::vector<Utterance> utterances;
  std::map<std::string, std::string> final_codes;  // agent_id -> synthesis text
};

// Checks the structural laws of a complete transcript: k*(R+2) utterances,
// k per round over rounds 0..R+1 with the right phases, non-empty texts and
// summaries, and one final code per agent. Throws invalid_argument on the
// first violation.
void validate_transcript(const Transcript& transcript);

// Raw text spoken by `agent_id` in `round`, when present.
std::optional<std::string> code_at(const Transcript& transcript, const std::string& agent_id,
                                   int round);

// Runs one discussion: every agent speaks in list order in round 0, the
// refinement rounds walk a fixed rotation that starts at the drawn (or
// index-0) speaker, and a final pass collects one synthesis code per agent in
// list order. Rounds 0..R are summarized into shared memory; the synthesis
// pass is not (its summary field carries the raw text). A backend failure
// stops the discussion and returns what was said so far flagged incomplete.
Transcript run_discussion(const SimulationConfig& config, backends::ChatBackend& backend,
                          const ingest::CommentRecord& item, int prompt_index,
                          std::uint64_t discussion_seed);

struct RunReport {
  std::size_t discussions_attempted = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  std::size_t utterances_total = 0;
  double wall_time_seconds = 0.0;
};

struct GridResult {
  std::vector<Transcript> transcripts;  // grid order: config-major, item-minor
  RunReport report;
};

// Runs every (config, item) discussion across `workers` threads (0 = one per
// hardware thread). The backend must tolerate concurrent calls. Results are
// deterministic for scripted backends regardless of worker count.
GridResult run_grid(const std::vector<SimulationConfig>& grid,
                    backends::ChatBackend& backend, std::size_t workers = 0);

}  // namespace rtb::engine
