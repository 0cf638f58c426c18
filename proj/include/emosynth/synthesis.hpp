#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emosynth/pipeline.hpp"

namespace emosynth {

enum class Termination { end_token, max_turns, error };

std::string_view termination_name(Termination termination);
Termination parse_termination(std::string_view name);

struct SessionTurn {
  Speaker speaker;
  std::string text;
  std::optional<SeekerOutput> seeker_annotation;  // seeker turns
  std::optional<TurnTrace> trace;                 // agent-mode counselor turns
  std::optional<CotRecord> cot;                   // llm-mode counselor turns

  bool operator==(const SessionTurn&) const = default;
};

// A full role-play session: strictly alternating turns starting with the
// seeker, a monotone goal ledger, and how the session ended.
struct DialogueSession {
  std::string card_id;
  std::string topic;
  std::vector<SessionTurn> turns;
  Termination terminated_by = Termination::max_turns;
  std::map<std::string, bool> goal_ledger;  // goal kind -> completed
  std::string error_message;                // set when terminated_by == error

  Transcript transcript() const;
  // Annotation of the last seeker turn, if any.
  const SeekerOutput* final_seeker_annotation() const;

  bool operator==(const DialogueSession&) const = default;
};

struct SessionOptions {
  AgentOptions agent;
  std::function<std::int64_t()> clock;     // memory entry timestamps
  EmotionMemory* memory_out = nullptr;     // captures the session memory
};

// Alternates the seeker simulator and the configured counselor pipeline until
// the seeker emits END or max_turns seeker turns have run. Unrecoverable
// backend/parse failures end the session with terminated_by=error, keeping
// everything produced so far.
DialogueSession run_session(const RoleCard& card, const PipelineConfig& config,
                            ChatBackend& backend, int max_turns,
                            const SessionOptions& options = {});

struct ScreenResult {
  bool accepted = false;
  std::string reason;  // empty iff accepted

  bool operator==(const ScreenResult&) const = default;
};

inline constexpr std::string_view kRejectNegativeEmotion = "negative_final_emotion";
inline constexpr std::string_view kRejectNoGoal = "no_goal_achieved";
inline constexpr std::string_view kRejectNoAnnotation = "missing_final_annotation";

// Accepts a session iff the final seeker emotion has no negative component
// (primary or secondary) and at least one goal was achieved. Rejections name
// the first failed criterion, emotion first.
ScreenResult screen(const DialogueSession& session,
                    const ValenceTable& valence = default_valence());

struct CorpusStats {
  std::size_t n_dialogues = 0;
  double avg_turns = 0.0;  // seeker+counselor exchange pairs per dialogue
  double avg_len = 0.0;    // characters per utterance (code points)
  std::map<std::string, std::size_t> topic_histogram;
};

CorpusStats compute_stats(const std::vector<DialogueSession>& sessions);
nlohmann::json stats_to_json(const CorpusStats& stats);

nlohmann::json session_to_json(const DialogueSession& session);
DialogueSession session_from_json(const nlohmann::json& doc);
void save_session(const DialogueSession& session, const std::string& path);
DialogueSession load_session(const std::string& path);
// Loads every *.json session in a directory, sorted by filename.
std::vector<DialogueSession> load_sessions_dir(const std::string& dir);

// Training rows for the four agent-mode datasets. Each row is a
// {"messages": [...]} document; prompts are re-rendered deterministically
// from the stored session.
struct AgentModeExport {
  std::vector<nlohmann::json> tracking;
  std::vector<nlohmann::json> counselor;
  std::vector<nlohmann::json> safety;
  std::vector<nlohmann::json> seeker;  // dialogue-guided seeker agent
};

AgentModeExport export_agent_mode(const std::vector<DialogueSession>& sessions,
                                  const AgentOptions& options = {});

struct LlmModeExport {
  std::vector<nlohmann::json> rows;  // one per counselor turn
  std::size_t skipped = 0;           // turns whose compilation failed
};

// One sample per counselor turn. Agent-mode turns are compiled into a chain
// of thought via the backend; llm-mode turns reuse their stored record.
LlmModeExport export_llm_mode(const std::vector<DialogueSession>& sessions,
                              ChatBackend& backend,
                              const AgentOptions& options = {});

void write_jsonl(const std::vector<nlohmann::json>& rows, const std::string& path);
std::vector<nlohmann::json> read_jsonl(const std::string& path);

}  // namespace emosynth
