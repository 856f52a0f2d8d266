#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roundtable/core.hpp"

namespace rtb::backends {

struct AgentSpec {
  std::string agent_id;
  std::string model_name;
  std::string endpoint;      // base URL for HTTP backends
  double temperature = 0.0;
  int max_tokens = 256;
  std::string api_key_env;   // name of the env var holding the key; never the key
};

enum class Role { system, user, assistant };

struct ChatMessage {
  Role role = Role::user;
  std::string content;
};

// Where in a discussion a completion is being requested; scripted backends
// key their plans on this.
struct TurnContext {
  Phase phase = Phase::initial;
  int round = 0;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  // Returns the assistant text for `messages`; throws empty_completion when
  // the provider answers with an empty string, transport_error on network
  // failure, and provider_error on a non-retryable HTTP status.
  virtual std::string chat_complete(const AgentSpec& agent,
                                    const std::vector<ChatMessage>& messages,
                                    const TurnContext& turn) = 0;

  // One-sentence compression of `text`, produced by the same agent.
  virtual std::string summarize_turn(const AgentSpec& agent, const std::string& text,
                                     const TurnContext& turn) = 0;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  // Embeds `texts` in order; every returned vector has the same dimension
  // (inconsistent_dim otherwise).
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;

  // Stable identifier used for cache keying.
  virtual std::string provider_id() const = 0;
};

// ---------------------------------------------------------------------------
// Scripted (offline, deterministic) backends

enum class SummaryRule { first_sentence, echo };

// A scripted agent's outputs, keyed by turn. Keys: "initial", "round_<n>",
// "synthesis"; "default" answers any turn without an explicit entry.
struct ScriptedPlan {
  std::map<std::string, std::string> outputs;
  SummaryRule summary_rule = SummaryRule::first_sentence;
};

// Turn key used for plan lookups, e.g. (refinement, 2) -> "round_2".
std::string turn_key(const TurnContext& turn);

// First sentence of `text`: up to and including the first '.', '!' or '?'
// (trailing quotes/brackets attached), whitespace-trimmed; the whole text
// when no terminator exists.
std::string first_sentence(const std::string& text);

class ScriptedChatBackend : public ChatBackend {
 public:
  explicit ScriptedChatBackend(std::map<std::string, ScriptedPlan> plans);

  // Loads plans from a JSON file: {"agents": {agent_id: {"outputs": {...},
  // "summary_rule": "first_sentence"|"echo"}}}.
  static ScriptedChatBackend from_file(const std::string& path);

  std::string chat_complete(const AgentSpec& agent, const std::vector<ChatMessage>& messages,
                            const TurnContext& turn) override;
  std::string summarize_turn(const AgentSpec& agent, const std::string& text,
                             const TurnContext& turn) override;

 private:
  std::map<std::string, ScriptedPlan> plans_;
};

class ScriptedEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit ScriptedEmbeddingBackend(std::size_t dim = 384);

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
  std::string provider_id() const override;

 private:
  std::size_t dim_;
};

// ---------------------------------------------------------------------------
// HTTP backends (OpenAI-compatible chat/completions and embeddings routes)

struct RetryPolicy {
  int max_attempts = 3;
  int base_delay_ms = 250;    // doubled per attempt, plus jitter
  int max_delay_ms = 4000;
  std::uint64_t jitter_seed = 0x5eedu;
  // Test seam: sleeping is injectable so retry tests run instantly.
  std::function<void(int /*ms*/)> sleeper;
};

class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(RetryPolicy retry = {});

  std::string chat_complete(const AgentSpec& agent, const std::vector<ChatMessage>& messages,
                            const TurnContext& turn) override;
  std::string summarize_turn(const AgentSpec& agent, const std::string& text,
                             const TurnContext& turn) override;

  // Instruction prepended when summarizing; exposed for configuration.
  std::string summary_instruction =
      "Summarize your previous statement in one sentence.";

 private:
  RetryPolicy retry_;
};

class HttpEmbeddingBackend : public EmbeddingBackend {
 public:
  // `spec.model_name` and `spec.endpoint` select the embeddings route;
  // `spec.api_key_env` names the env var holding the bearer token.
  HttpEmbeddingBackend(AgentSpec spec, RetryPolicy retry = {});

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
  std::string provider_id() const override;

 private:
  AgentSpec spec_;
  RetryPolicy retry_;
};

// Shared POST-with-retry helper. Retries transport failures, 429 and 5xx
// with exponential backoff and jitter; other non-2xx statuses throw
// provider_error immediately. Returns the response body.
std::string post_json_with_retry(const std::string& endpoint, const std::string& path,
                                 const std::string& body, const std::string& api_key_env,
                                 const RetryPolicy& retry);

}  // namespace rtb::backends
