#include "emosynth/agent_types.hpp"

#include <algorithm>

#include "emosynth/emotion_json.hpp"

namespace emosynth {

using nlohmann::json;

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::exploration: return "exploration";
    case Stage::comforting: return "comforting";
    case Stage::action: return "action";
  }
  throw Error("invalid stage");
}

Stage parse_stage(std::string_view name) {
  if (name == "exploration") return Stage::exploration;
  if (name == "comforting") return Stage::comforting;
  if (name == "action") return Stage::action;
  throw Error("invalid counseling stage: '" + std::string(name) + "'");
}

std::string_view behavior_name(Behavior behavior) {
  switch (behavior) {
    case Behavior::normal: return "normal";
    case Behavior::silence: return "silence";
    case Behavior::excessive_sentimentality: return "excessive_sentimentality";
    case Behavior::explosive_anger: return "explosive_anger";
  }
  throw Error("invalid behavior");
}

Behavior parse_behavior(std::string_view name) {
  for (Behavior behavior : kAllBehaviors) {
    if (name == behavior_name(behavior)) {
      return behavior;
    }
  }
  throw Error("invalid reaction behavior: '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) {
    return {};
  }
  const auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

std::optional<std::string> fenced_block(const std::string& reply,
                                        const std::string& fence) {
  const auto open = reply.find(fence);
  if (open == std::string::npos) {
    return std::nullopt;
  }
  const auto body_start = open + fence.size();
  const auto close = reply.find("```", body_start);
  if (close == std::string::npos) {
    return std::nullopt;
  }
  return reply.substr(body_start, close - body_start);
}

}  // namespace

json extract_reply_json(const std::string& reply) {
  std::string candidate;
  if (auto block = fenced_block(reply, "```json")) {
    candidate = *block;
  } else if (auto plain = fenced_block(reply, "```")) {
    candidate = *plain;
  } else {
    candidate = reply;
  }
  try {
    return json::parse(trim(candidate));
  } catch (const json::exception& ex) {
    throw ParseError(std::string("reply is not valid JSON: ") + ex.what(), reply);
  }
}

SeekerOutput parse_seeker_output(const std::string& reply) {
  const json doc = extract_reply_json(reply);
  try {
    SeekerOutput output;
    output.current_emotion = emotion_state_from_json(doc.at("current_emotion"));
    if (doc.contains("triggering_events")) {
      output.triggering_events =
          doc.at("triggering_events").get<std::vector<std::string>>();
    }
    if (doc.contains("completed_goals")) {
      for (const auto& goal : doc.at("completed_goals")) {
        output.completed_goals.push_back(parse_goal_kind(goal.get<std::string>()));
      }
    }
    output.response = trim(doc.at("response").get<std::string>());
    if (output.response.ends_with("END")) {
      output.end_flag = true;
      output.response = trim(output.response.substr(0, output.response.size() - 3));
    }
    return output;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed seeker output: ") + ex.what(), reply);
  } catch (const Error& ex) {
    throw ParseError(std::string("malformed seeker output: ") + ex.what(), reply);
  }
}

json seeker_output_to_json(const SeekerOutput& output) {
  json doc;
  doc["current_emotion"] = emotion_state_to_json(output.current_emotion);
  doc["triggering_events"] = output.triggering_events;
  doc["completed_goals"] = json::array();
  for (GoalKind kind : output.completed_goals) {
    doc["completed_goals"].push_back(std::string(goal_kind_name(kind)));
  }
  doc["response"] = output.end_flag ? output.response + " END" : output.response;
  return doc;
}

EmotionAnalysis parse_emotion_analysis(const std::string& reply) {
  const json doc = extract_reply_json(reply);
  try {
    return emotion_analysis_from_json(doc);
  } catch (const Error& ex) {
    throw ParseError(std::string("malformed emotion analysis: ") + ex.what(), reply);
  }
}

EmotionAnalysis emotion_analysis_from_json(const json& doc) {
  try {
    EmotionAnalysis analysis;
    analysis.state = emotion_state_from_json(doc.at("current_emotion"));
    analysis.recent_shifts = doc.at("recent_shifts").get<std::string>();
    analysis.overall_trend = doc.at("overall_trend").get<std::string>();
    analysis.causes = doc.at("causes").get<std::string>();
    return analysis;
  } catch (const json::exception& ex) {
    throw Error(std::string("malformed emotion analysis: ") + ex.what());
  }
}

json emotion_analysis_to_json(const EmotionAnalysis& analysis) {
  json doc;
  doc["current_emotion"] = emotion_state_to_json(analysis.state);
  doc["recent_shifts"] = analysis.recent_shifts;
  doc["overall_trend"] = analysis.overall_trend;
  doc["causes"] = analysis.causes;
  return doc;
}

CounselorDraft parse_counselor_draft(const std::string& reply) {
  const json doc = extract_reply_json(reply);
  try {
    CounselorDraft draft;
    draft.stage = parse_stage(doc.at("stage").get<std::string>());
    draft.strategies = doc.at("strategies").get<std::vector<std::string>>();
    if (draft.strategies.empty()) {
      throw Error("strategies must be a non-empty list");
    }
    for (const auto& strategy : draft.strategies) {
      if (trim(strategy).empty()) {
        throw Error("strategy labels must be non-empty");
      }
    }
    draft.draft = doc.at("draft").get<std::string>();
    if (trim(draft.draft).empty()) {
      throw Error("draft text must be non-empty");
    }
    return draft;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed counselor draft: ") + ex.what(), reply);
  } catch (const Error& ex) {
    throw ParseError(std::string("malformed counselor draft: ") + ex.what(), reply);
  }
}

json counselor_draft_to_json(const CounselorDraft& draft) {
  json doc;
  doc["stage"] = std::string(stage_name(draft.stage));
  doc["strategies"] = draft.strategies;
  doc["draft"] = draft.draft;
  return doc;
}

std::vector<PredictedReaction> reactions_from_json(const json& doc) {
  try {
    std::vector<PredictedReaction> reactions;
    for (const auto& item : doc.at("reactions")) {
      reactions.push_back({parse_behavior(item.at("behavior").get<std::string>()),
                           item.at("reaction").get<std::string>()});
    }
    return reactions;
  } catch (const json::exception& ex) {
    throw Error(std::string("malformed reaction list: ") + ex.what());
  }
}

std::vector<PredictedReaction> parse_reactions(const std::string& reply,
                                               const std::vector<Behavior>& requested) {
  const json doc = extract_reply_json(reply);
  try {
    std::vector<PredictedReaction> reactions = reactions_from_json(doc);
    // Exactly one reaction per requested behavior.
    for (Behavior behavior : requested) {
      const auto count = std::count_if(
          reactions.begin(), reactions.end(),
          [&](const PredictedReaction& r) { return r.behavior == behavior; });
      if (count != 1) {
        throw Error("expected exactly one '" + std::string(behavior_name(behavior)) +
                    "' reaction, got " + std::to_string(count));
      }
    }
    if (reactions.size() != requested.size()) {
      throw Error("reply contains reactions for behaviors that were not requested");
    }
    return reactions;
  } catch (const Error& ex) {
    throw ParseError(std::string("malformed reaction list: ") + ex.what(), reply);
  }
}

json reactions_to_json(const std::vector<PredictedReaction>& reactions) {
  json doc;
  doc["reactions"] = json::array();
  for (const auto& reaction : reactions) {
    doc["reactions"].push_back({{"behavior", behavior_name(reaction.behavior)},
                                {"reaction", reaction.reaction_text}});
  }
  return doc;
}

SafetyVerdict parse_safety_verdict(const std::string& reply, std::size_t reaction_count) {
  const json doc = extract_reply_json(reply);
  try {
    SafetyVerdict verdict;
    verdict.safe = doc.at("safe").get<bool>();
    if (doc.contains("risky_reactions")) {
      verdict.risky_reactions = doc.at("risky_reactions").get<std::vector<int>>();
    }
    for (int index : verdict.risky_reactions) {
      if (index < 0 || static_cast<std::size_t>(index) >= reaction_count) {
        throw Error("risky reaction index " + std::to_string(index) +
                    " out of range (have " + std::to_string(reaction_count) +
                    " reactions)");
      }
    }
    verdict.suggestions = doc.value("suggestions", "");
    if (!verdict.safe && trim(verdict.suggestions).empty()) {
      throw Error("unsafe verdict must carry modification suggestions");
    }
    if (verdict.safe && !trim(verdict.suggestions).empty()) {
      throw Error("safe verdict must not carry suggestions");
    }
    return verdict;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed safety verdict: ") + ex.what(), reply);
  } catch (const Error& ex) {
    throw ParseError(std::string("malformed safety verdict: ") + ex.what(), reply);
  }
}

json safety_verdict_to_json(const SafetyVerdict& verdict) {
  json doc;
  doc["safe"] = verdict.safe;
  doc["risky_reactions"] = verdict.risky_reactions;
  doc["suggestions"] = verdict.suggestions;
  return doc;
}

}  // namespace emosynth
