#include "emosynth/synthesis.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "emosynth/emotion_json.hpp"

namespace emosynth {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view termination_name(Termination termination) {
  switch (termination) {
    case Termination::end_token: return "end_token";
    case Termination::max_turns: return "max_turns";
    case Termination::error: return "error";
  }
  throw Error("invalid termination");
}

Termination parse_termination(std::string_view name) {
  if (name == "end_token") return Termination::end_token;
  if (name == "max_turns") return Termination::max_turns;
  if (name == "error") return Termination::error;
  throw Error("invalid termination: '" + std::string(name) + "'");
}

Transcript DialogueSession::transcript() const {
  Transcript history;
  history.reserve(turns.size());
  for (const auto& turn : turns) {
    history.push_back({turn.speaker, turn.text});
  }
  return history;
}

const SeekerOutput* DialogueSession::final_seeker_annotation() const {
  for (auto it = turns.rbegin(); it != turns.rend(); ++it) {
    if (it->speaker == Speaker::seeker && it->seeker_annotation) {
      return &*it->seeker_annotation;
    }
  }
  return nullptr;
}

DialogueSession run_session(const RoleCard& card, const PipelineConfig& config,
                            ChatBackend& backend, int max_turns,
                            const SessionOptions& options) {
  const auto violations = validate_card(card);
  if (!violations.empty()) {
    throw PreconditionError("invalid role card '" + card.id +
                            "': " + violations.front());
  }
  if (max_turns < 1) {
    throw PreconditionError("max_turns must be at least 1");
  }
  validate_pipeline_config(config);

  DialogueSession session;
  session.card_id = card.id;
  session.topic = card.topic;
  for (const auto& goal : card.goals) {
    session.goal_ledger[std::string(goal_kind_name(goal.kind))] = false;
  }

  EmotionMemory memory(card.id, options.clock);
  Transcript history;

  for (int turn = 0; turn < max_turns; ++turn) {
    SeekerOutput seeker;
    try {
      seeker = run_seeker(card, history, backend, options.agent);
    } catch (const Error& ex) {
      session.terminated_by = Termination::error;
      session.error_message = ex.what();
      break;
    }
    // Ledger flags only ever flip to true.
    for (GoalKind kind : seeker.completed_goals) {
      session.goal_ledger[std::string(goal_kind_name(kind))] = true;
    }
    session.turns.push_back(
        {Speaker::seeker, seeker.response, seeker, std::nullopt, std::nullopt});
    history.push_back({Speaker::seeker, seeker.response});
    if (seeker.end_flag) {
      session.terminated_by = Termination::end_token;
      break;
    }

    try {
      if (config.mode == PipelineMode::agent) {
        TurnTrace trace =
            agent_mode_turn(history, memory, config, backend, options.agent);
        session.turns.push_back({Speaker::counselor, trace.final_response,
                                 std::nullopt, trace, std::nullopt});
        history.push_back({Speaker::counselor, trace.final_response});
      } else {
        CotRecord record = llm_mode_turn(history, config, backend, options.agent);
        session.turns.push_back({Speaker::counselor, record.response, std::nullopt,
                                 std::nullopt, record});
        history.push_back({Speaker::counselor, record.response});
      }
    } catch (const Error& ex) {
      session.terminated_by = Termination::error;
      session.error_message = ex.what();
      break;
    }

    if (turn + 1 == max_turns) {
      session.terminated_by = Termination::max_turns;
    }
  }

  if (options.memory_out) {
    *options.memory_out = memory;
  }
  return session;
}

ScreenResult screen(const DialogueSession& session, const ValenceTable& valence) {
  const SeekerOutput* final_annotation = session.final_seeker_annotation();
  if (!final_annotation) {
    return {false, std::string(kRejectNoAnnotation)};
  }
  const EmotionState& state = final_annotation->current_emotion;
  auto negative = [&](EmotionTerm term) { return score(term, valence) < 0; };
  if (negative(state.primary()) ||
      std::any_of(state.secondary().begin(), state.secondary().end(), negative)) {
    return {false, std::string(kRejectNegativeEmotion)};
  }
  const bool any_goal =
      std::any_of(session.goal_ledger.begin(), session.goal_ledger.end(),
                  [](const auto& entry) { return entry.second; });
  if (!any_goal) {
    return {false, std::string(kRejectNoGoal)};
  }
  return {true, {}};
}

CorpusStats compute_stats(const std::vector<DialogueSession>& sessions) {
  if (sessions.empty()) {
    throw EmptyCorpus("no sessions to compute statistics over");
  }
  CorpusStats stats;
  stats.n_dialogues = sessions.size();
  std::size_t exchanges = 0;
  std::size_t utterances = 0;
  std::size_t characters = 0;
  for (const auto& session : sessions) {
    for (const auto& turn : session.turns) {
      if (turn.speaker == Speaker::seeker) {
        ++exchanges;  // each seeker turn opens one exchange pair
      }
      ++utterances;
      characters += utf8_length(turn.text);
    }
    ++stats.topic_histogram[session.topic];
  }
  stats.avg_turns =
      static_cast<double>(exchanges) / static_cast<double>(sessions.size());
  stats.avg_len = utterances == 0 ? 0.0
                                  : static_cast<double>(characters) /
                                        static_cast<double>(utterances);
  return stats;
}

json stats_to_json(const CorpusStats& stats) {
  json doc;
  doc["n_dialogues"] = stats.n_dialogues;
  doc["avg_turns"] = stats.avg_turns;
  doc["avg_len"] = stats.avg_len;
  doc["topic_histogram"] = stats.topic_histogram;
  return doc;
}

json session_to_json(const DialogueSession& session) {
  json doc;
  doc["card_id"] = session.card_id;
  doc["topic"] = session.topic;
  doc["terminated_by"] = std::string(termination_name(session.terminated_by));
  doc["goal_ledger"] = session.goal_ledger;
  if (!session.error_message.empty()) {
    doc["error_message"] = session.error_message;
  }
  doc["turns"] = json::array();
  for (const auto& turn : session.turns) {
    json entry;
    entry["speaker"] = std::string(speaker_name(turn.speaker));
    entry["text"] = turn.text;
    if (turn.seeker_annotation) {
      entry["annotation"] = seeker_output_to_json(*turn.seeker_annotation);
    }
    if (turn.trace) {
      entry["trace"] = trace_to_json(*turn.trace);
    }
    if (turn.cot) {
      entry["cot"] = {{"text", serialize_cot(*turn.cot)}};
    }
    doc["turns"].push_back(std::move(entry));
  }
  return doc;
}

DialogueSession session_from_json(const json& doc) {
  try {
    DialogueSession session;
    session.card_id = doc.at("card_id").get<std::string>();
    session.topic = doc.value("topic", "");
    session.terminated_by =
        parse_termination(doc.at("terminated_by").get<std::string>());
    session.goal_ledger =
        doc.at("goal_ledger").get<std::map<std::string, bool>>();
    session.error_message = doc.value("error_message", "");
    for (const auto& entry : doc.at("turns")) {
      SessionTurn turn;
      turn.speaker = parse_speaker(entry.at("speaker").get<std::string>());
      turn.text = entry.at("text").get<std::string>();
      if (entry.contains("annotation")) {
        turn.seeker_annotation =
            parse_seeker_output(entry.at("annotation").dump());
      }
      if (entry.contains("trace")) {
        turn.trace = trace_from_json(entry.at("trace"));
      }
      if (entry.contains("cot")) {
        turn.cot = parse_cot(entry.at("cot").at("text").get<std::string>());
      }
      session.turns.push_back(std::move(turn));
    }
    return session;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed session document: ") + ex.what(),
                     doc.dump());
  }
}

void save_session(const DialogueSession& session, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write session file: " + path);
  }
  out << session_to_json(session).dump(2) << '\n';
}

DialogueSession load_session(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open session file: " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw ParseError(path + ": invalid session JSON: " + ex.what());
  }
  return session_from_json(doc);
}

std::vector<DialogueSession> load_sessions_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw ConfigError("not a session directory: " + dir);
  }
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<DialogueSession> sessions;
  sessions.reserve(paths.size());
  for (const auto& path : paths) {
    sessions.push_back(load_session(path));
  }
  return sessions;
}

namespace {

json sample(const std::string& user, const std::string& assistant) {
  return json{{"messages",
               json::array({json{{"role", "user"}, {"content", user}},
                            json{{"role", "assistant"}, {"content", assistant}}})}};
}

int seeker_turns_before(const DialogueSession& session, std::size_t turn_index) {
  int count = 0;
  for (std::size_t i = 0; i < turn_index; ++i) {
    if (session.turns[i].speaker == Speaker::seeker) {
      ++count;
    }
  }
  return count;
}

}  // namespace

AgentModeExport export_agent_mode(const std::vector<DialogueSession>& sessions,
                                  const AgentOptions& options) {
  AgentModeExport out;
  for (const auto& session : sessions) {
    EmotionMemory memory(session.card_id);
    Transcript history;
    for (std::size_t i = 0; i < session.turns.size(); ++i) {
      const SessionTurn& turn = session.turns[i];
      if (turn.speaker == Speaker::seeker) {
        history.push_back({Speaker::seeker, turn.text});
        continue;
      }
      if (turn.trace) {
        const TurnTrace& trace = *turn.trace;
        if (trace.analysis) {
          out.tracking.push_back(
              sample(build_tracking_prompt(history, memory, options),
                     emotion_analysis_to_json(*trace.analysis).dump()));
          memory.append(seeker_turns_before(session, i) - 1, *trace.analysis);
        }
        out.counselor.push_back(
            sample(build_counselor_prompt(history, std::nullopt, std::nullopt,
                                          options),
                   render_tool_transcript(trace)));
        AgentOptions safety_options = options;
        safety_options.safety_history = history;
        for (std::size_t d = 0; d < trace.verdicts.size(); ++d) {
          const std::string& draft = trace.drafts[d].draft;
          out.seeker.push_back(
              sample(build_reaction_prompt(history, draft, options),
                     reactions_to_json(trace.reactions_per_draft[d]).dump()));
          out.safety.push_back(
              sample(build_safety_prompt(draft, trace.reactions_per_draft[d],
                                         safety_options),
                     safety_verdict_to_json(trace.verdicts[d]).dump()));
        }
      }
      history.push_back({Speaker::counselor, turn.text});
    }
  }
  return out;
}

LlmModeExport export_llm_mode(const std::vector<DialogueSession>& sessions,
                              ChatBackend& backend, const AgentOptions& options) {
  const TemplateSet& templates =
      options.templates ? *options.templates : default_templates();
  LlmModeExport out;
  for (const auto& session : sessions) {
    Transcript history;
    for (const auto& turn : session.turns) {
      if (turn.speaker == Speaker::seeker) {
        history.push_back({Speaker::seeker, turn.text});
        continue;
      }
      const std::string prompt =
          templates.llm_mode.render({{"history", render_history(history)}});
      if (turn.cot) {
        out.rows.push_back(sample(prompt, serialize_cot(*turn.cot)));
      } else if (turn.trace) {
        try {
          CotRecord record = compile_cot(*turn.trace, backend, options);
          out.rows.push_back(sample(prompt, serialize_cot(record)));
        } catch (const Error&) {
          ++out.skipped;  // skip the turn, keep exporting
        }
      }
      history.push_back({Speaker::counselor, turn.text});
    }
  }
  return out;
}

void write_jsonl(const std::vector<json>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write file: " + path);
  }
  for (const auto& row : rows) {
    out << row.dump() << '\n';
  }
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open file: " + path);
  }
  std::vector<json> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      rows.push_back(json::parse(line));
    }
  }
  return rows;
}

}  // namespace emosynth
