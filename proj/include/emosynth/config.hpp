#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "emosynth/backend.hpp"
#include "emosynth/emotion.hpp"
#include "emosynth/pipeline.hpp"

namespace emosynth {

// One backend profile. API keys are named by environment variable, never
// stored in the file.
struct BackendProfile {
  std::string type = "http";  // "http" or "scripted"
  std::string base_url;
  std::string model = "default";
  std::string api_key_env;
  double temperature = 0.0;
  int timeout_s = 60;
  int max_retries = 2;
  std::string script;              // scripted: path to the response script
  bool replay_per_session = true;  // scripted: fresh replay for each session
};

struct SynthesisConfig {
  int max_turns = 12;
  int parallelism = 1;
  std::string out_dir = "out";
  std::optional<std::size_t> sample_n;  // stratified-sample the card pool
  std::uint64_t seed = 0;
};

struct EvalConfig {
  std::size_t n_cards = 100;
  std::uint64_t seed = 42;
  int max_turns = 10;
};

struct EngineConfig {
  // "default" is required; a "seeker" profile, when present, powers the
  // seeker simulator separately from the evaluated counselor.
  std::map<std::string, BackendProfile> backends;
  PipelineConfig pipeline;
  SynthesisConfig synthesis;
  EvalConfig eval;
  std::map<std::string, int> valence_overrides;  // group name -> sign
  StateScorePolicy state_score_policy = StateScorePolicy::primary_only;
  std::optional<std::string> template_dir;
  std::optional<std::string> emotion_vocabulary;  // data file override
  std::optional<std::string> topic_labels;        // data file override
};

EngineConfig default_config();
EngineConfig load_config(const std::string& path);  // throws ConfigError

// Default table plus the configured per-group sign overrides.
ValenceTable valence_from(const EngineConfig& config);

// Loads {"responses": [{"content": ..., "key"?: ...}]} into a fresh backend.
std::unique_ptr<ScriptedBackend> load_scripted_backend(const std::string& path);

// Produces backends for sessions. HTTP profiles share one client; scripted
// profiles with replay_per_session get a fresh replay per call, which keeps
// concurrent sessions deterministic.
using BackendFactory = std::function<std::shared_ptr<ChatBackend>()>;
BackendFactory make_backend_factory(const BackendProfile& profile);

// Scripted profiles run with a fixed clock so reruns are byte-identical.
std::function<std::int64_t()> clock_for(const BackendProfile& profile);

const BackendProfile& profile_or_default(const EngineConfig& config,
                                         const std::string& name);

}  // namespace emosynth
