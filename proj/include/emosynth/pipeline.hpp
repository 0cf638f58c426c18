#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emosynth/agent_types.hpp"
#include "emosynth/backend.hpp"
#include "emosynth/dialogue.hpp"
#include "emosynth/memory.hpp"
#include "emosynth/prompts.hpp"

namespace emosynth {

enum class PipelineMode { agent, llm };

std::string_view mode_name(PipelineMode mode);
PipelineMode parse_mode(std::string_view name);

struct PipelineConfig {
  bool em_enabled = true;
  bool rc_enabled = true;
  int max_regenerations = 3;
  std::vector<Behavior> reaction_behaviors{kAllBehaviors.begin(),
                                           kAllBehaviors.end()};
  PipelineMode mode = PipelineMode::agent;
};

void validate_pipeline_config(const PipelineConfig& config);

// One tracking or safety invocation, as it appears in the tool transcript.
struct ToolEvent {
  nlohmann::json call;      // {"name": ..., "arguments": {...}}
  nlohmann::json response;  // agent output document

  bool operator==(const ToolEvent&) const = default;
};

// Everything one agent-mode counselor turn produced.
struct TurnTrace {
  std::optional<EmotionAnalysis> analysis;
  std::vector<CounselorDraft> drafts;
  std::vector<std::vector<PredictedReaction>> reactions_per_draft;
  std::vector<SafetyVerdict> verdicts;
  std::string final_response;
  int regeneration_count = 0;
  bool risk_unresolved = false;
  std::vector<ToolEvent> tool_events;

  bool operator==(const TurnTrace&) const = default;
};

nlohmann::json trace_to_json(const TurnTrace& trace);
TurnTrace trace_from_json(const nlohmann::json& doc);

// The single-pass chain of thought: four first-person reasoning sections
// followed by the response.
struct CotRecord {
  std::string emotion_shift_tracking;
  std::string counseling_plan;
  std::string safety_risk_analysis;
  std::string integration;
  std::string response;

  bool operator==(const CotRecord&) const = default;
};

// Bracket-header text format ([Emotion Shift Tracking] ... [Response] ...).
// parse_cot enforces presence, order, and non-emptiness of every section.
std::string serialize_cot(const CotRecord& record);
CotRecord parse_cot(const std::string& text);

// Parses only the four reasoning sections (response left empty); used when
// compiling a trace, where the response is pinned separately.
CotRecord parse_cot_reasoning(const std::string& text);

// Raised when a turn fails mid-flight; carries what was produced so far.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& message, std::string cause_type, TurnTrace partial)
      : Error(message), cause_type_(std::move(cause_type)),
        partial_trace_(std::move(partial)) {}

  const std::string& cause_type() const { return cause_type_; }
  const TurnTrace& partial_trace() const { return partial_trace_; }

 private:
  std::string cause_type_;
  TurnTrace partial_trace_;
};

// Runs one counselor turn through tracking, drafting, reaction prediction
// and safety analysis, regenerating unsafe drafts up to
// config.max_regenerations times. With EM disabled the tracking stage is
// skipped; with RC disabled the first draft is final.
TurnTrace agent_mode_turn(const Transcript& history, EmotionMemory& memory,
                          const PipelineConfig& config, ChatBackend& backend,
                          const AgentOptions& options = {});

// Single-call counterpart: one request, reply parsed into a CotRecord.
CotRecord llm_mode_turn(const Transcript& history, const PipelineConfig& config,
                        ChatBackend& backend, const AgentOptions& options = {});

// Rewrites a completed agent-mode trace into a first-person chain of thought
// via one templated request. The record's response always equals
// trace.final_response.
CotRecord compile_cot(const TurnTrace& trace, ChatBackend& backend,
                      const AgentOptions& options = {});

// <tool_call>/<tool_response> rendering of a turn, ending with the final
// response text. parse_tool_transcript inverts it.
std::string render_tool_transcript(const TurnTrace& trace);

struct ToolTranscript {
  std::vector<ToolEvent> tool_events;
  std::string final_response;
};

ToolTranscript parse_tool_transcript(const std::string& text);

}  // namespace emosynth
