#include "roundtable/engine.hpp"

#include <atomic>
#include <chrono>
#include <set>
#include <thread>

#include "roundtable/error.hpp"
#include "roundtable/hash.hpp"

namespace rtb::engine {

namespace {

constexpr const char* kSynthesisInstruction =
    "Considering the discussion above, provide your final code for the comment.";

std::string sanitize_component(const std::string& raw) {
  // Path-safe item ids: keep [A-Za-z0-9._-], replace the rest, and append a
  // short hash when anything was replaced so distinct ids stay distinct.
  std::string safe;
  bool replaced = false;
  for (unsigned char c : raw) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '.' || c == '_' || c == '-';
    if (ok) {
      safe.push_back(char(c));
    } else {
      safe.push_back('_');
      replaced = true;
    }
  }
  if (safe.empty() || replaced) {
    safe += "-" + sha256_hex(raw).substr(0, 8);
  }
  return safe;
}

}  // namespace

void validate(const SimulationConfig& config) {
  if (config.agents.size() < 2) {
    fail("invalid_argument", "a discussion needs at least 2 agents");
  }
  if (config.rounds < 1) {
    fail("invalid_argument", "rounds must be >= 1");
  }
  if (config.prompts.empty()) {
    fail("invalid_argument", "no prompts configured");
  }
  if (config.items.items.empty()) {
    fail("invalid_argument", "no items to discuss");
  }
  std::set<std::string> seen;
  for (const auto& agent : config.agents) {
    if (agent.agent_id.empty()) {
      fail("invalid_argument", "agent with empty agent_id");
    }
    if (!seen.insert(agent.agent_id).second) {
      fail("invalid_argument", "duplicate agent_id '" + agent.agent_id + "'");
    }
  }
}

std::string config_slug(std::size_t k, int rounds) {
  return "k" + std::to_string(k) + "_r" + std::to_string(rounds);
}

std::string Memory::render() const {
  std::string out;
  for (const auto& entry : entries_) {
    out += entry.agent_id;
    out += ": ";
    out += entry.summary;
    out += '\n';
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string assemble_context(const std::string& prompt, const std::string& item_text,
                             const Memory& memory) {
  std::string context = prompt;
  context += "\n\nComment:\n";
  context += item_text;
  if (!memory.entries().empty()) {
    context += "\n\nDiscussion so far:\n";
    context += memory.render();
  }
  return context;
}

void validate_transcript(const Transcript& t) {
  std::size_t k = t.agents.size();
  int rounds = t.rounds;
  if (k < 2 || rounds < 1) {
    fail("invalid_argument", "transcript " + t.discussion_id + ": bad agent or round count");
  }
  std::size_t expected = k * std::size_t(rounds + 2);
  if (t.utterances.size() != expected) {
    fail("invalid_argument", "transcript " + t.discussion_id + ": expected " +
                                 std::to_string(expected) + " utterances, found " +
                                 std::to_string(t.utterances.size()));
  }
  std::map<int, std::size_t> per_round;
  for (const auto& u : t.utterances) {
    Phase want = u.round == 0              ? Phase::initial
                 : u.round <= rounds       ? Phase::refinement
                                           : Phase::synthesis;
    if (u.round < 0 || u.round > rounds + 1 || u.phase != want) {
      fail("invalid_argument",
           "transcript " + t.discussion_id + ": utterance with inconsistent phase/round");
    }
    if (u.raw_text.empty() || u.summary.empty()) {
      fail("invalid_argument",
           "transcript " + t.discussion_id + ": empty raw_text or summary");
    }
    ++per_round[u.round];
  }
  for (int r = 0; r <= rounds + 1; ++r) {
    if (per_round[r] != k) {
      fail("invalid_argument", "transcript " + t.discussion_id + ": round " +
                                   std::to_string(r) + " has " +
                                   std::to_string(per_round[r]) + " utterances, expected " +
                                   std::to_string(k));
    }
  }
  if (t.final_codes.size() != k) {
    fail("invalid_argument",
         "transcript " + t.discussion_id + ": final_codes does not cover every agent");
  }
  for (const auto& agent : t.agents) {
    auto it = t.final_codes.find(agent.agent_id);
    if (it == t.final_codes.end() || it->second.empty()) {
      fail("invalid_argument", "transcript " + t.discussion_id +
                                   ": missing final code for agent '" + agent.agent_id + "'");
    }
  }
}

std::optional<std::string> code_at(const Transcript& transcript, const std::string& agent_id,
                                   int round) {
  for (const auto& u : transcript.utterances) {
    if (u.round == round && u.agent_id == agent_id) return u.raw_text;
  }
  return std::nullopt;
}

Transcript run_discussion(const SimulationConfig& config, backends::ChatBackend& backend,
                          const ingest::CommentRecord& item, int prompt_index,
                          std::uint64_t discussion_seed) {
  validate(config);
  if (prompt_index < 0 || std::size_t(prompt_index) >= config.prompts.size()) {
    fail("invalid_argument", "prompt_index out of range");
  }

  std::size_t k = config.agents.size();
  Transcript transcript;
  transcript.item_id = item.id;
  transcript.prompt_index = prompt_index;
  transcript.rounds = config.rounds;
  transcript.discussion_id = config_slug(k, config.rounds) + "/" +
                             sanitize_component(item.id) + "_" + std::to_string(prompt_index);
  for (const auto& agent : config.agents) {
    transcript.agents.push_back({agent.agent_id, agent.model_name});
  }

  if (config.start_rotation == StartRotation::randomized) {
    SplitMix rng(discussion_seed);
    transcript.start_agent_index = int(rng.next_below(k));
  } else {
    transcript.start_agent_index = 0;
  }

  const std::string& prompt = config.prompts[std::size_t(prompt_index)];
  Memory memory;

  auto speak = [&](std::size_t agent_index, Phase phase, int round) {
    const backends::AgentSpec& agent = config.agents[agent_index];
    backends::TurnContext turn{phase, round};
    std::string context = assemble_context(prompt, item.text, memory);
    if (phase == Phase::synthesis) {
      context += "\n\n";
      context += kSynthesisInstruction;
    }
    std::vector<backends::ChatMessage> messages{{backends::Role::user, context}};
    std::string raw = backend.chat_complete(agent, messages, turn);

    Utterance utterance;
    utterance.agent_id = agent.agent_id;
    utterance.phase = phase;
    utterance.round = round;
    utterance.raw_text = raw;
    if (phase == Phase::synthesis) {
      // Synthesis codes are final; they are never compressed into memory.
      utterance.summary = raw;
      transcript.final_codes[agent.agent_id] = raw;
    } else {
      utterance.summary = backend.summarize_turn(agent, raw, turn);
      memory.append({agent.agent_id, round, utterance.summary});
    }
    transcript.utterances.push_back(std::move(utterance));
  };

  try {
    for (std::size_t i = 0; i < k; ++i) {
      speak(i, Phase::initial, 0);
    }
    for (int round = 1; round <= config.rounds; ++round) {
      for (std::size_t j = 0; j < k; ++j) {
        speak((std::size_t(transcript.start_agent_index) + j) % k, Phase::refinement, round);
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      speak(i, Phase::synthesis, config.rounds + 1);
    }
  } catch (const Error&) {
    transcript.incomplete = true;
    return transcript;
  }
  return transcript;
}

GridResult run_grid(const std::vector<SimulationConfig>& grid,
                    backends::ChatBackend& backend, std::size_t workers) {
  auto started = std::chrono::steady_clock::now();
  for (const auto& config : grid) validate(config);

  struct Task {
    const SimulationConfig* config;
    const ingest::CommentRecord* item;
    int prompt_index;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& config : grid) {
    std::string slug = config_slug(config.agents.size(), config.rounds);
    for (std::size_t i = 0; i < config.items.items.size(); ++i) {
      const auto& item = config.items.items[i];
      int prompt_index = int(i % config.prompts.size());
      // Seeded per discussion from stable identifiers, so membership and
      // order changes elsewhere in the grid do not shift this draw.
      std::uint64_t seed = config.seed ^ fnv1a64(slug + "|" + item.id + "|" +
                                                 std::to_string(prompt_index));
      tasks.push_back({&config, &item, prompt_index, seed});
    }
  }

  GridResult result;
  result.transcripts.resize(tasks.size());
  result.report.discussions_attempted = tasks.size();

  if (workers == 0) {
    workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  workers = std::min(workers, std::max<std::size_t>(1, tasks.size()));

  std::atomic<std::size_t> next{0};
  auto run_worker = [&] {
    while (true) {
      std::size_t index = next.fetch_add(1);
      if (index >= tasks.size()) break;
      const Task& task = tasks[index];
      result.transcripts[index] =
          run_discussion(*task.config, backend, *task.item, task.prompt_index, task.seed);
    }
  };

  if (workers == 1) {
    run_worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(run_worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& transcript : result.transcripts) {
    result.report.utterances_total += transcript.utterances.size();
    if (transcript.incomplete) {
      ++result.report.failed;
    } else {
      ++result.report.completed;
    }
  }
  result.report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace rtb::engine
