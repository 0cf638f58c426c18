#include "emosynth/backend.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace emosynth {

using nlohmann::json;

std::string_view role_name(MessageRole role) {
  switch (role) {
    case MessageRole::system: return "system";
    case MessageRole::user: return "user";
    case MessageRole::assistant: return "assistant";
    case MessageRole::tool: return "tool";
  }
  throw Error("invalid message role");
}

MessageRole parse_role(std::string_view name) {
  if (name == "system") return MessageRole::system;
  if (name == "user") return MessageRole::user;
  if (name == "assistant") return MessageRole::assistant;
  if (name == "tool") return MessageRole::tool;
  throw Error("invalid message role: '" + std::string(name) + "'");
}

void validate_request(const ChatRequest& request) {
  if (request.messages.empty()) {
    throw PreconditionError("chat request has no messages");
  }
  const MessageRole first = request.messages.front().role;
  if (first != MessageRole::system && first != MessageRole::user) {
    throw PreconditionError("chat request must start with a system or user message");
  }
  if (request.temperature < 0.0 || request.temperature > 2.0) {
    throw PreconditionError("temperature must be in [0, 2]");
  }
  if (request.max_tokens && *request.max_tokens <= 0) {
    throw PreconditionError("max_tokens must be positive");
  }
}

std::string to_wire_json(const ChatRequest& request) {
  json body;
  body["model"] = request.model;
  body["messages"] = json::array();
  for (const auto& message : request.messages) {
    body["messages"].push_back(
        {{"role", role_name(message.role)}, {"content", message.content}});
  }
  body["temperature"] = request.temperature;
  if (request.max_tokens) {
    body["max_tokens"] = *request.max_tokens;
  }
  return body.dump();
}

ChatRequest from_wire_json(const std::string& body) {
  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::exception& ex) {
    throw Error(std::string("malformed request body: ") + ex.what());
  }
  ChatRequest request;
  request.model = parsed.at("model").get<std::string>();
  for (const auto& message : parsed.at("messages")) {
    request.messages.push_back(
        {parse_role(message.at("role").get<std::string>()),
         message.at("content").get<std::string>()});
  }
  request.temperature = parsed.value("temperature", 0.0);
  if (parsed.contains("max_tokens")) {
    request.max_tokens = parsed.at("max_tokens").get<int>();
  }
  return request;
}

namespace {

struct SplitUrl {
  std::string host;  // scheme://host[:port]
  std::string prefix;
};

SplitUrl split_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("backend base_url must include a scheme: " + base_url);
  }
  auto path_start = base_url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.host = base_url;
  } else {
    out.host = base_url.substr(0, path_start);
    out.prefix = base_url.substr(path_start);
    while (!out.prefix.empty() && out.prefix.back() == '/') {
      out.prefix.pop_back();
    }
  }
  return out;
}

FinishReason parse_finish_reason(const std::string& reason) {
  if (reason == "length") return FinishReason::length;
  if (reason == "stop" || reason.empty()) return FinishReason::stop;
  return FinishReason::error;
}

ChatResponse parse_completion_body(const std::string& body) {
  json payload;
  try {
    payload = json::parse(body);
  } catch (const json::exception& ex) {
    throw BackendError(std::string("malformed completion payload: ") + ex.what());
  }
  if (!payload.contains("choices") || payload["choices"].empty()) {
    throw BackendError("completion payload has no choices");
  }
  const auto& choice = payload["choices"][0];
  ChatResponse response;
  response.content = choice.at("message").value("content", "");
  response.finish_reason =
      parse_finish_reason(choice.value("finish_reason", "stop"));
  if (payload.contains("usage") && payload["usage"].is_object()) {
    response.usage.prompt_tokens = payload["usage"].value("prompt_tokens", 0);
    response.usage.completion_tokens =
        payload["usage"].value("completion_tokens", 0);
  }
  return response;
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  split_base_url(config_.base_url);  // fail fast on malformed URLs
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
  validate_request(request);
  const SplitUrl url = split_base_url(config_.base_url);
  const std::string path = url.prefix + "/chat/completions";
  const std::string body = to_wire_json(request);

  httplib::Client client(url.host);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  std::string last_failure = "transport failure";
  bool rate_limited = false;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(config_.retry_base_delay * (1 << (attempt - 1)));
    }
    auto result = client.Post(path, headers, body, "application/json");
    if (!result) {
      last_failure = "transport failure: " + httplib::to_string(result.error());
      rate_limited = false;
      continue;
    }
    const int status = result->status;
    if (status == 401 || status == 403) {
      throw AuthError("authentication rejected (HTTP " + std::to_string(status) + ")");
    }
    if (status == 429) {
      last_failure = "rate limited (HTTP 429)";
      rate_limited = true;
      continue;
    }
    if (status >= 500) {
      last_failure = "server error (HTTP " + std::to_string(status) + ")";
      rate_limited = false;
      continue;
    }
    if (status >= 400) {
      throw BackendError("request rejected (HTTP " + std::to_string(status) +
                         "): " + result->body);
    }
    return parse_completion_body(result->body);
  }
  if (rate_limited) {
    throw RateLimited(last_failure + " after " +
                      std::to_string(config_.max_retries) + " retries");
  }
  throw BackendError(last_failure + " after " +
                     std::to_string(config_.max_retries) + " retries");
}

void ScriptedBackend::push(ChatResponse response, std::optional<std::string> key) {
  std::lock_guard lock(mutex_);
  script_.push_back({std::move(response), std::move(key)});
}

void ScriptedBackend::push_content(std::string content,
                                   std::optional<std::string> key) {
  push(ChatResponse{std::move(content), FinishReason::stop, {}}, std::move(key));
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return script_.size();
}

std::vector<ChatRequest> ScriptedBackend::requests() const {
  std::lock_guard lock(mutex_);
  return seen_;
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  validate_request(request);
  std::lock_guard lock(mutex_);
  seen_.push_back(request);
  auto matches = [&](const Entry& entry) {
    if (!entry.key) {
      return true;
    }
    return std::any_of(request.messages.begin(), request.messages.end(),
                       [&](const ChatMessage& m) {
                         return m.content.find(*entry.key) != std::string::npos;
                       });
  };
  for (auto it = script_.begin(); it != script_.end(); ++it) {
    if (matches(*it)) {
      ChatResponse response = std::move(it->response);
      script_.erase(it);
      return response;
    }
  }
  throw ScriptExhausted("scripted backend has no response for this request (" +
                        std::to_string(script_.size()) + " unmatched entries left)");
}

}  // namespace emosynth
