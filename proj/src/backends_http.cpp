#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "roundtable/backends.hpp"
#include "roundtable/error.hpp"
#include "roundtable/hash.hpp"

namespace rtb::backends {

namespace {

const char* role_name(Role role) {
  switch (role) {
    case Role::system:
      return "system";
    case Role::user:
      return "user";
    case Role::assistant:
      return "assistant";
  }
  return "user";
}

std::string bearer_token(const std::string& api_key_env) {
  if (api_key_env.empty()) return {};
  const char* value = std::getenv(api_key_env.c_str());
  return value ? std::string(value) : std::string();
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

}  // namespace

std::string post_json_with_retry(const std::string& endpoint, const std::string& path,
                                 const std::string& body, const std::string& api_key_env,
                                 const RetryPolicy& retry) {
  std::string token = bearer_token(api_key_env);
  SplitMix jitter(retry.jitter_seed);
  auto sleep_ms = [&](int ms) {
    if (retry.sleeper) {
      retry.sleeper(ms);
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    }
  };

  std::string last_failure;
  for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
    httplib::Client client(endpoint);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

    auto result = client.Post(path, headers, body, "application/json");
    if (result) {
      if (result->status >= 200 && result->status < 300) {
        return result->body;
      }
      if (!retryable_status(result->status)) {
        fail("provider_error", "POST " + endpoint + path + " returned status " +
                                   std::to_string(result->status) + ": " + result->body);
      }
      last_failure = "status " + std::to_string(result->status);
    } else {
      last_failure = "transport failure (" + httplib::to_string(result.error()) + ")";
    }
    if (attempt < retry.max_attempts) {
      int delay = retry.base_delay_ms << (attempt - 1);
      delay = std::min(delay, retry.max_delay_ms);
      delay += static_cast<int>(jitter.next_below(std::uint64_t(delay / 2 + 1)));
      sleep_ms(delay);
    }
  }
  fail("transport_error", "POST " + endpoint + path + " failed after " +
                              std::to_string(retry.max_attempts) + " attempts; last: " +
                              last_failure);
}

HttpChatBackend::HttpChatBackend(RetryPolicy retry) : retry_(std::move(retry)) {}

std::string HttpChatBackend::chat_complete(const AgentSpec& agent,
                                           const std::vector<ChatMessage>& messages,
                                           const TurnContext&) {
  nlohmann::json payload;
  payload["model"] = agent.model_name;
  payload["temperature"] = agent.temperature;
  payload["max_tokens"] = agent.max_tokens;
  payload["messages"] = nlohmann::json::array();
  for (const auto& m : messages) {
    payload["messages"].push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }

  std::string body = post_json_with_retry(agent.endpoint, "/chat/completions", payload.dump(),
                                          agent.api_key_env, retry_);
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    fail("provider_error", std::string("chat response is not valid JSON: ") + e.what());
  }
  if (!response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty()) {
    fail("provider_error", "chat response has no choices");
  }
  const auto& message = response["choices"][0]["message"];
  if (!message.contains("content") || !message["content"].is_string()) {
    fail("provider_error", "chat response choice has no message content");
  }
  std::string text = message["content"].get<std::string>();
  if (text.empty()) {
    fail("empty_completion", "model '" + agent.model_name + "' returned empty content");
  }
  return text;
}

std::string HttpChatBackend::summarize_turn(const AgentSpec& agent, const std::string& text,
                                            const TurnContext& turn) {
  std::vector<ChatMessage> messages;
  messages.push_back({Role::user, summary_instruction + "\n\n" + text});
  return chat_complete(agent, messages, turn);
}

HttpEmbeddingBackend::HttpEmbeddingBackend(AgentSpec spec, RetryPolicy retry)
    : spec_(std::move(spec)), retry_(std::move(retry)) {}

std::string HttpEmbeddingBackend::provider_id() const {
  return "http-" + spec_.model_name;
}

std::vector<EmbeddingVector> HttpEmbeddingBackend::embed(
    const std::vector<std::string>& texts) {
  if (texts.empty()) return {};
  nlohmann::json payload;
  payload["model"] = spec_.model_name;
  payload["input"] = texts;

  std::string body = post_json_with_retry(spec_.endpoint, "/embeddings", payload.dump(),
                                          spec_.api_key_env, retry_);
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    fail("provider_error", std::string("embeddings response is not valid JSON: ") + e.what());
  }
  if (!response.contains("data") || !response["data"].is_array() ||
      response["data"].size() != texts.size()) {
    fail("provider_error", "embeddings response data does not match input count");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::string id = provider_id();
  std::size_t expected_dim = 0;
  for (const auto& entry : response["data"]) {
    if (!entry.contains("embedding") || !entry["embedding"].is_array()) {
      fail("provider_error", "embeddings response entry has no embedding array");
    }
    std::vector<double> values;
    values.reserve(entry["embedding"].size());
    for (const auto& v : entry["embedding"]) values.push_back(v.get<double>());
    if (expected_dim == 0) expected_dim = values.size();
    if (values.empty() || values.size() != expected_dim) {
      fail("inconsistent_dim", "embeddings response mixes dimensions");
    }
    out.push_back(make_embedding(std::move(values), id));
  }
  return out;
}

}  // namespace rtb::backends
