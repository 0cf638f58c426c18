#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "emosynth/errors.hpp"

namespace emosynth {

enum class MessageRole { system, user, assistant, tool };

std::string_view role_name(MessageRole role);
MessageRole parse_role(std::string_view name);

struct ChatMessage {
  MessageRole role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

// One chat-completion request. Temperature defaults to 0.0 so runs are
// reproducible unless a caller opts into sampling.
struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<int> max_tokens;

  bool operator==(const ChatRequest&) const = default;
};

// Throws PreconditionError when the request violates its invariants
// (empty messages, bad leading role, temperature outside [0, 2]).
void validate_request(const ChatRequest& request);

// OpenAI-compatible wire body. from_wire_json(to_wire_json(r)) == r.
std::string to_wire_json(const ChatRequest& request);
ChatRequest from_wire_json(const std::string& body);

enum class FinishReason { stop, length, error };

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  bool operator==(const TokenUsage&) const = default;
};

struct ChatResponse {
  std::string content;
  FinishReason finish_reason = FinishReason::stop;
  TokenUsage usage;

  bool operator==(const ChatResponse&) const = default;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  // Completes one request. Throws BackendError / AuthError / RateLimited /
  // ScriptExhausted per the concrete backend.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

struct HttpBackendConfig {
  std::string base_url;            // e.g. https://host:port/v1
  std::string api_key;             // resolved by the caller, usually from env
  int max_retries = 2;             // transient failures only
  std::chrono::milliseconds timeout{60'000};
  std::chrono::milliseconds retry_base_delay{500};
};

// Chat-completions client over HTTP POST {base_url}/chat/completions with a
// bearer token. Retries transport failures, 5xx and 429 with exponential
// backoff; 401/403 raise AuthError immediately.
class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  ChatResponse complete(const ChatRequest& request) override;

 private:
  HttpBackendConfig config_;
};

// Deterministic canned backend for tests and offline runs. Responses are
// served FIFO; an entry with a key only matches requests whose message text
// contains that key, so concurrent sessions stay deterministic per key.
class ScriptedBackend : public ChatBackend {
 public:
  ScriptedBackend() = default;

  void push(ChatResponse response, std::optional<std::string> key = {});
  void push_content(std::string content, std::optional<std::string> key = {});

  std::size_t remaining() const;

  // Requests seen so far, in completion order (for assertions).
  std::vector<ChatRequest> requests() const;

  ChatResponse complete(const ChatRequest& request) override;

 private:
  struct Entry {
    ChatResponse response;
    std::optional<std::string> key;
  };

  mutable std::mutex mutex_;
  std::deque<Entry> script_;
  std::vector<ChatRequest> seen_;
};

}  // namespace emosynth
