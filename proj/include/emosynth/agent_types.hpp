#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emosynth/emotion.hpp"
#include "emosynth/role_card.hpp"

namespace emosynth {

// What the seeker simulator reports each turn. end_flag mirrors the literal
// END token at the end of the raw response; the stored response text has the
// token stripped.
struct SeekerOutput {
  EmotionState current_emotion{EmotionTerm{EmotionGroup::sadness, 2}};
  std::vector<std::string> triggering_events;
  std::vector<GoalKind> completed_goals;
  std::string response;
  bool end_flag = false;

  bool operator==(const SeekerOutput&) const = default;
};

struct EmotionAnalysis {
  EmotionState state{EmotionTerm{EmotionGroup::sadness, 2}};
  std::string recent_shifts;
  std::string overall_trend;
  std::string causes;

  bool operator==(const EmotionAnalysis&) const = default;
};

// Helping Skills stages.
enum class Stage { exploration, comforting, action };

std::string_view stage_name(Stage stage);
Stage parse_stage(std::string_view name);  // throws Error on anything else

struct CounselorDraft {
  Stage stage = Stage::exploration;
  std::vector<std::string> strategies;
  std::string draft;

  bool operator==(const CounselorDraft&) const = default;
};

// The four behavior types the dialogue-guided seeker can exhibit.
enum class Behavior { normal, silence, excessive_sentimentality, explosive_anger };

inline constexpr std::array<Behavior, 4> kAllBehaviors = {
    Behavior::normal, Behavior::silence, Behavior::excessive_sentimentality,
    Behavior::explosive_anger};

std::string_view behavior_name(Behavior behavior);
Behavior parse_behavior(std::string_view name);

struct PredictedReaction {
  Behavior behavior = Behavior::normal;
  std::string reaction_text;

  bool operator==(const PredictedReaction&) const = default;
};

// Safety decision over a draft. suggestions is empty exactly when safe.
struct SafetyVerdict {
  bool safe = true;
  std::vector<int> risky_reactions;  // indices into the reaction list
  std::string suggestions;

  bool operator==(const SafetyVerdict&) const = default;
};

// Pulls the JSON document out of a model reply: the first ```json fenced
// block, else the first ``` fenced block, else the whole reply. Throws
// ParseError (with the raw reply preserved) when nothing parses.
nlohmann::json extract_reply_json(const std::string& reply);

// Parsers reject exactly the documents that violate the type invariants;
// each serializer emits a document its parser maps back to the same value.
SeekerOutput parse_seeker_output(const std::string& reply);
nlohmann::json seeker_output_to_json(const SeekerOutput& output);

EmotionAnalysis parse_emotion_analysis(const std::string& reply);
nlohmann::json emotion_analysis_to_json(const EmotionAnalysis& analysis);
EmotionAnalysis emotion_analysis_from_json(const nlohmann::json& doc);

CounselorDraft parse_counselor_draft(const std::string& reply);
nlohmann::json counselor_draft_to_json(const CounselorDraft& draft);

// requested lists the behaviors the reply must cover, exactly once each.
std::vector<PredictedReaction> parse_reactions(const std::string& reply,
                                               const std::vector<Behavior>& requested);
// Deserialization without the coverage constraint (stored traces).
std::vector<PredictedReaction> reactions_from_json(const nlohmann::json& doc);
nlohmann::json reactions_to_json(const std::vector<PredictedReaction>& reactions);

// reaction_count bounds the risky_reactions indices.
SafetyVerdict parse_safety_verdict(const std::string& reply, std::size_t reaction_count);
nlohmann::json safety_verdict_to_json(const SafetyVerdict& verdict);

}  // namespace emosynth
