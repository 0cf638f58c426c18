#include "emosynth/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

#include "emosynth/emotion_json.hpp"

namespace emosynth {

using nlohmann::json;

std::string_view mode_name(PipelineMode mode) {
  return mode == PipelineMode::agent ? "agent" : "llm";
}

PipelineMode parse_mode(std::string_view name) {
  if (name == "agent") return PipelineMode::agent;
  if (name == "llm") return PipelineMode::llm;
  throw ConfigError("invalid pipeline mode: '" + std::string(name) + "'");
}

void validate_pipeline_config(const PipelineConfig& config) {
  if (config.max_regenerations < 1) {
    throw ConfigError("max_regenerations must be at least 1");
  }
  if (config.rc_enabled && config.reaction_behaviors.empty()) {
    throw ConfigError("risk control requires at least one reaction behavior");
  }
}

namespace {

constexpr std::string_view kTrackingTool = "emotion_tracking";
constexpr std::string_view kSafetyTool = "safety_analysis";

std::string trim(std::string_view text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) {
    return {};
  }
  const auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

int seeker_turn_index(const Transcript& history) {
  int count = 0;
  for (const auto& utterance : history) {
    if (utterance.speaker == Speaker::seeker) {
      ++count;
    }
  }
  return count - 1;
}

}  // namespace

json trace_to_json(const TurnTrace& trace) {
  json doc;
  if (trace.analysis) {
    doc["analysis"] = emotion_analysis_to_json(*trace.analysis);
  }
  doc["drafts"] = json::array();
  for (const auto& draft : trace.drafts) {
    doc["drafts"].push_back(counselor_draft_to_json(draft));
  }
  doc["reactions_per_draft"] = json::array();
  for (const auto& reactions : trace.reactions_per_draft) {
    doc["reactions_per_draft"].push_back(reactions_to_json(reactions));
  }
  doc["verdicts"] = json::array();
  for (const auto& verdict : trace.verdicts) {
    doc["verdicts"].push_back(safety_verdict_to_json(verdict));
  }
  doc["final_response"] = trace.final_response;
  doc["regeneration_count"] = trace.regeneration_count;
  doc["risk_unresolved"] = trace.risk_unresolved;
  doc["tool_events"] = json::array();
  for (const auto& event : trace.tool_events) {
    doc["tool_events"].push_back({{"call", event.call}, {"response", event.response}});
  }
  return doc;
}

TurnTrace trace_from_json(const json& doc) {
  try {
    TurnTrace trace;
    if (doc.contains("analysis")) {
      trace.analysis = emotion_analysis_from_json(doc.at("analysis"));
    }
    for (const auto& draft : doc.at("drafts")) {
      trace.drafts.push_back(parse_counselor_draft(draft.dump()));
    }
    for (const auto& reactions : doc.at("reactions_per_draft")) {
      trace.reactions_per_draft.push_back(reactions_from_json(reactions));
    }
    for (const auto& verdict : doc.at("verdicts")) {
      trace.verdicts.push_back(
          parse_safety_verdict(verdict.dump(), SIZE_MAX));
    }
    trace.final_response = doc.at("final_response").get<std::string>();
    trace.regeneration_count = doc.at("regeneration_count").get<int>();
    trace.risk_unresolved = doc.value("risk_unresolved", false);
    for (const auto& event : doc.at("tool_events")) {
      trace.tool_events.push_back({event.at("call"), event.at("response")});
    }
    return trace;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed turn trace: ") + ex.what(), doc.dump());
  }
}

TurnTrace agent_mode_turn(const Transcript& history, EmotionMemory& memory,
                          const PipelineConfig& config, ChatBackend& backend,
                          const AgentOptions& options) {
  validate_pipeline_config(config);
  if (config.mode != PipelineMode::agent) {
    throw PreconditionError("agent_mode_turn requires mode=agent");
  }
  TurnTrace trace;
  try {
    std::optional<EmotionAnalysis> analysis;
    if (config.em_enabled) {
      analysis = run_emotion_tracking(history, memory, backend, options);
      trace.analysis = analysis;
      trace.tool_events.push_back(
          {json{{"name", kTrackingTool},
                {"arguments",
                 {{"history", render_history(history)},
                  {"memory", memory.render(options.memory_window)}}}},
           emotion_analysis_to_json(*analysis)});
      memory.append(seeker_turn_index(history), *analysis);
    }

    AgentOptions reaction_options = options;
    reaction_options.behaviors = config.reaction_behaviors;
    AgentOptions safety_options = options;
    safety_options.safety_history = history;

    CounselorDraft draft = run_counselor(history, analysis, std::nullopt, backend, options);
    trace.drafts.push_back(draft);

    if (config.rc_enabled) {
      while (true) {
        auto reactions =
            run_reaction_prediction(history, draft.draft, backend, reaction_options);
        trace.reactions_per_draft.push_back(reactions);
        SafetyVerdict verdict =
            run_safety_analysis(draft.draft, reactions, backend, safety_options);
        trace.verdicts.push_back(verdict);
        trace.tool_events.push_back(
            {json{{"name", kSafetyTool},
                  {"arguments",
                   {{"draft", draft.draft},
                    {"reactions", reactions_to_json(reactions)["reactions"]}}}},
             safety_verdict_to_json(verdict)});
        if (verdict.safe) {
          break;
        }
        draft = run_counselor(history, analysis, verdict.suggestions, backend, options);
        trace.drafts.push_back(draft);
        ++trace.regeneration_count;
        if (trace.regeneration_count == config.max_regenerations) {
          // Out of budget: keep the last redraft, flag the turn.
          trace.risk_unresolved = true;
          break;
        }
      }
    }
    trace.final_response = trace.drafts.back().draft;
    return trace;
  } catch (const BackendError& ex) {
    trace.final_response =
        trace.drafts.empty() ? std::string{} : trace.drafts.back().draft;
    throw PipelineError(ex.what(), "backend", std::move(trace));
  } catch (const ParseError& ex) {
    trace.final_response =
        trace.drafts.empty() ? std::string{} : trace.drafts.back().draft;
    throw PipelineError(ex.what(), "parse", std::move(trace));
  }
}

CotRecord llm_mode_turn(const Transcript& history, const PipelineConfig& config,
                        ChatBackend& backend, const AgentOptions& options) {
  validate_pipeline_config(config);
  if (config.mode != PipelineMode::llm) {
    throw PreconditionError("llm_mode_turn requires mode=llm");
  }
  const TemplateSet& templates =
      options.templates ? *options.templates : default_templates();
  const std::string prompt =
      templates.llm_mode.render({{"history", render_history(history)}});
  ChatRequest request;
  request.model = options.model;
  request.messages = {{MessageRole::user, prompt}};
  request.temperature = options.temperature;
  request.max_tokens = options.max_tokens;
  const ChatResponse reply = backend.complete(request);
  return parse_cot(reply.content);
}

namespace {

std::string render_trace_block(const TurnTrace& trace) {
  std::string out;
  if (trace.analysis) {
    out += "emotion analysis:\n" + render_analysis_block(*trace.analysis) + "\n";
  }
  for (std::size_t i = 0; i < trace.drafts.size(); ++i) {
    const auto& draft = trace.drafts[i];
    out += "draft " + std::to_string(i + 1) + " [stage " +
           std::string(stage_name(draft.stage)) + "]: " + draft.draft + "\n";
    if (i < trace.reactions_per_draft.size()) {
      out += "predicted reactions:\n" +
             render_reactions_block(trace.reactions_per_draft[i]) + "\n";
    }
    if (i < trace.verdicts.size()) {
      const auto& verdict = trace.verdicts[i];
      out += std::string("safety verdict: ") + (verdict.safe ? "safe" : "unsafe");
      if (!verdict.suggestions.empty()) {
        out += "; suggestions: " + verdict.suggestions;
      }
      out += "\n";
    }
  }
  out.pop_back();
  return out;
}

}  // namespace

CotRecord compile_cot(const TurnTrace& trace, ChatBackend& backend,
                      const AgentOptions& options) {
  if (trace.drafts.empty()) {
    throw PreconditionError("cannot compile a chain of thought from an empty trace");
  }
  const TemplateSet& templates =
      options.templates ? *options.templates : default_templates();
  const std::string prompt = templates.cot_compile.render({
      {"trace", render_trace_block(trace)},
      {"final_response", trace.final_response},
  });
  ChatRequest request;
  request.model = options.model;
  request.messages = {{MessageRole::user, prompt}};
  request.temperature = options.temperature;
  request.max_tokens = options.max_tokens;
  const ChatResponse reply = backend.complete(request);

  // The reply carries the four reasoning sections; the response is pinned to
  // what the pipeline actually sent.
  CotRecord record = parse_cot_reasoning(reply.content);
  record.response = trace.final_response;
  return record;
}

namespace {

struct Section {
  std::string_view header;
  std::string CotRecord::*field;
};

constexpr std::array<Section, 5> kSections = {{
    {"[Emotion Shift Tracking]", &CotRecord::emotion_shift_tracking},
    {"[Current Counseling Plan]", &CotRecord::counseling_plan},
    {"[Safety Risk Analysis]", &CotRecord::safety_risk_analysis},
    {"[Integration]", &CotRecord::integration},
    {"[Response]", &CotRecord::response},
}};

std::string section_label(std::string_view header) {
  return std::string(header.substr(1, header.size() - 2));
}

CotRecord parse_sections(const std::string& text, std::size_t count) {
  std::array<std::size_t, kSections.size()> positions{};
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto pos = text.find(kSections[i].header);
    if (pos == std::string::npos) {
      throw ParseError("missing section: " + section_label(kSections[i].header), text);
    }
    if (pos < cursor) {
      throw ParseError("section out of order: " + section_label(kSections[i].header),
                       text);
    }
    positions[i] = pos;
    cursor = pos + kSections[i].header.size();
  }
  CotRecord record;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t begin = positions[i] + kSections[i].header.size();
    std::size_t end = i + 1 < count ? positions[i + 1] : text.size();
    if (i + 1 == count && count < kSections.size()) {
      // Reasoning-only parse: drop any trailing [Response] the model added.
      const auto trailing = text.find(kSections.back().header, begin);
      if (trailing != std::string::npos) {
        end = trailing;
      }
    }
    std::string content = trim(std::string_view(text).substr(begin, end - begin));
    if (content.empty()) {
      throw ParseError("empty section: " + section_label(kSections[i].header), text);
    }
    record.*(kSections[i].field) = std::move(content);
  }
  return record;
}

}  // namespace

CotRecord parse_cot_reasoning(const std::string& text) {
  return parse_sections(text, kSections.size() - 1);
}

std::string serialize_cot(const CotRecord& record) {
  std::string out;
  const CotRecord& r = record;
  for (const auto& section : kSections) {
    out += std::string(section.header) + "\n" + trim(r.*(section.field)) + "\n";
  }
  out.pop_back();
  return out;
}

CotRecord parse_cot(const std::string& text) {
  return parse_sections(text, kSections.size());
}

std::string render_tool_transcript(const TurnTrace& trace) {
  std::string out;
  for (const auto& event : trace.tool_events) {
    out += "<tool_call>\n" + event.call.dump() + "\n</tool_call>\n";
    out += "<tool_response>\n" + event.response.dump() + "\n</tool_response>\n";
  }
  out += trace.final_response;
  return out;
}

ToolTranscript parse_tool_transcript(const std::string& text) {
  ToolTranscript transcript;
  std::size_t cursor = 0;
  while (true) {
    const auto call_open = text.find("<tool_call>", cursor);
    if (call_open == std::string::npos) {
      break;
    }
    const auto call_close = text.find("</tool_call>", call_open);
    const auto response_open = text.find("<tool_response>", call_open);
    const auto response_close = text.find("</tool_response>", call_open);
    if (call_close == std::string::npos || response_open == std::string::npos ||
        response_close == std::string::npos || response_open < call_close) {
      throw ParseError("malformed tool transcript: unbalanced tags", text);
    }
    const std::string call_payload =
        trim(text.substr(call_open + 11, call_close - call_open - 11));
    const std::string response_payload =
        trim(text.substr(response_open + 15, response_close - response_open - 15));
    try {
      transcript.tool_events.push_back(
          {json::parse(call_payload), json::parse(response_payload)});
    } catch (const json::exception& ex) {
      throw ParseError(std::string("malformed tool payload: ") + ex.what(), text);
    }
    cursor = response_close + 16;
  }
  transcript.final_response = trim(text.substr(cursor));
  return transcript;
}

}  // namespace emosynth
