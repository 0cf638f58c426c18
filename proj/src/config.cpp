#include "emosynth/config.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

namespace emosynth {

using nlohmann::json;

namespace {

BackendProfile profile_from_json(const json& doc, const std::string& name) {
  BackendProfile profile;
  profile.type = doc.value("type", "http");
  if (profile.type != "http" && profile.type != "scripted") {
    throw ConfigError("backend '" + name + "': unknown type '" + profile.type + "'");
  }
  profile.base_url = doc.value("base_url", "");
  profile.model = doc.value("model", "default");
  profile.api_key_env = doc.value("api_key_env", "");
  profile.temperature = doc.value("temperature", 0.0);
  profile.timeout_s = doc.value("timeout_s", 60);
  profile.max_retries = doc.value("max_retries", 2);
  profile.script = doc.value("script", "");
  profile.replay_per_session = doc.value("replay_per_session", true);
  if (profile.type == "http" && profile.base_url.empty()) {
    throw ConfigError("backend '" + name + "': http profiles require base_url");
  }
  if (profile.type == "scripted" && profile.script.empty()) {
    throw ConfigError("backend '" + name + "': scripted profiles require script");
  }
  return profile;
}

std::vector<Behavior> behaviors_from_json(const json& doc) {
  std::vector<Behavior> behaviors;
  for (const auto& name : doc) {
    behaviors.push_back(parse_behavior(name.get<std::string>()));
  }
  return behaviors;
}

}  // namespace

EngineConfig default_config() {
  EngineConfig config;
  BackendProfile profile;
  profile.type = "scripted";
  profile.script = "script.json";
  config.backends["default"] = profile;
  return config;
}

EngineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw ConfigError(path + ": invalid JSON: " + ex.what());
  }

  EngineConfig config;
  try {
    if (!doc.contains("backends") || !doc["backends"].is_object() ||
        !doc["backends"].contains("default")) {
      throw ConfigError(path + ": config requires backends.default");
    }
    for (const auto& [name, profile] : doc["backends"].items()) {
      config.backends[name] = profile_from_json(profile, name);
    }
    if (doc.contains("pipeline")) {
      const auto& p = doc["pipeline"];
      config.pipeline.em_enabled = p.value("em_enabled", true);
      config.pipeline.rc_enabled = p.value("rc_enabled", true);
      config.pipeline.max_regenerations = p.value("max_regenerations", 3);
      if (p.contains("reaction_behaviors")) {
        config.pipeline.reaction_behaviors =
            behaviors_from_json(p["reaction_behaviors"]);
      }
      config.pipeline.mode = parse_mode(p.value("mode", "agent"));
    }
    if (doc.contains("synthesis")) {
      const auto& s = doc["synthesis"];
      config.synthesis.max_turns = s.value("max_turns", 12);
      config.synthesis.parallelism = s.value("parallelism", 1);
      config.synthesis.out_dir = s.value("out_dir", "out");
      if (s.contains("sample_n")) {
        config.synthesis.sample_n = s["sample_n"].get<std::size_t>();
      }
      config.synthesis.seed = s.value("seed", 0);
    }
    if (doc.contains("eval")) {
      const auto& e = doc["eval"];
      config.eval.n_cards = e.value("n_cards", 100);
      config.eval.seed = e.value("seed", 42);
      config.eval.max_turns = e.value("max_turns", 10);
    }
    if (doc.contains("valence_overrides")) {
      for (const auto& [group, sign] : doc["valence_overrides"].items()) {
        parse_group(group);  // validate the name
        config.valence_overrides[group] = sign.get<int>();
      }
    }
    if (doc.contains("state_score_policy")) {
      const std::string policy = doc["state_score_policy"].get<std::string>();
      if (policy == "primary_only") {
        config.state_score_policy = StateScorePolicy::primary_only;
      } else if (policy == "mean_with_secondaries") {
        config.state_score_policy = StateScorePolicy::mean_with_secondaries;
      } else {
        throw ConfigError(path + ": unknown state_score_policy '" + policy + "'");
      }
    }
    if (doc.contains("template_dir")) {
      config.template_dir = doc["template_dir"].get<std::string>();
    }
    if (doc.contains("emotion_vocabulary")) {
      config.emotion_vocabulary = doc["emotion_vocabulary"].get<std::string>();
    }
    if (doc.contains("topic_labels")) {
      config.topic_labels = doc["topic_labels"].get<std::string>();
    }
  } catch (const json::exception& ex) {
    throw ConfigError(path + ": malformed config: " + ex.what());
  }
  validate_pipeline_config(config.pipeline);
  return config;
}

ValenceTable valence_from(const EngineConfig& config) {
  ValenceTable table;
  for (const auto& [group, sign] : config.valence_overrides) {
    table.set_sign(parse_group(group), sign);
  }
  return table;
}

std::unique_ptr<ScriptedBackend> load_scripted_backend(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open script file: " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw ConfigError(path + ": invalid script JSON: " + ex.what());
  }
  auto backend = std::make_unique<ScriptedBackend>();
  if (!doc.contains("responses") || !doc["responses"].is_array()) {
    throw ConfigError(path + ": script requires a responses array");
  }
  for (const auto& entry : doc["responses"]) {
    std::optional<std::string> key;
    if (entry.contains("key")) {
      key = entry["key"].get<std::string>();
    }
    backend->push_content(entry.at("content").get<std::string>(), key);
  }
  return backend;
}

BackendFactory make_backend_factory(const BackendProfile& profile) {
  if (profile.type == "scripted") {
    if (profile.replay_per_session) {
      const std::string script = profile.script;
      return [script]() -> std::shared_ptr<ChatBackend> {
        return load_scripted_backend(script);
      };
    }
    std::shared_ptr<ChatBackend> shared = load_scripted_backend(profile.script);
    return [shared]() { return shared; };
  }

  HttpBackendConfig http;
  http.base_url = profile.base_url;
  if (!profile.api_key_env.empty()) {
    if (const char* key = std::getenv(profile.api_key_env.c_str())) {
      http.api_key = key;
    }
  }
  http.max_retries = profile.max_retries;
  http.timeout = std::chrono::seconds(profile.timeout_s);
  std::shared_ptr<ChatBackend> shared = std::make_shared<HttpBackend>(http);
  return [shared]() { return shared; };
}

std::function<std::int64_t()> clock_for(const BackendProfile& profile) {
  if (profile.type == "scripted") {
    return []() -> std::int64_t { return 0; };
  }
  return {};  // system clock
}

const BackendProfile& profile_or_default(const EngineConfig& config,
                                         const std::string& name) {
  auto it = config.backends.find(name);
  if (it != config.backends.end()) {
    return it->second;
  }
  return config.backends.at("default");
}

}  // namespace emosynth
