#include "emosynth/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace emosynth {

using nlohmann::json;

double eis(const EvalSession& session) {
  if (session.annotations.empty()) {
    throw EmptySession("cannot score a session with no annotated turns");
  }
  return session.annotations.back().emotion_score - session.initial_score;
}

double eds(const EvalSession& session) {
  if (session.annotations.empty()) {
    throw EmptySession("cannot score a session with no annotated turns");
  }
  double sum = 0.0;
  for (const auto& annotation : session.annotations) {
    sum += std::max(0.0, -annotation.delta);
  }
  return sum / static_cast<double>(session.annotations.size());
}

double gar(const EvalSession& session) {
  if (session.goals_total <= 0) {
    throw NoGoals("session defines no goals");
  }
  return static_cast<double>(session.goals_completed) /
         static_cast<double>(session.goals_total);
}

double rls(const EvalSession& session) {
  if (session.annotations.empty()) {
    throw EmptySession("cannot score a session with no annotated turns");
  }
  double sum = 0.0;
  for (const auto& annotation : session.annotations) {
    sum += annotation.risk;
  }
  return sum / static_cast<double>(session.annotations.size());
}

MetricsReport summarize(const std::vector<EvalSession>& sessions,
                        std::size_t errors,
                        std::vector<std::string> error_messages) {
  MetricsReport report;
  report.errors = errors;
  report.error_messages = std::move(error_messages);
  for (const auto& session : sessions) {
    report.sessions.push_back({session.card_id, eis(session), eds(session),
                               gar(session), rls(session),
                               session.turn_count()});
  }
  if (!report.sessions.empty()) {
    SessionMetrics means;
    means.card_id = "mean";
    for (const auto& row : report.sessions) {
      means.eis += row.eis;
      means.eds += row.eds;
      means.gar += row.gar;
      means.rls += row.rls;
      means.turns += row.turns;
    }
    const auto n = static_cast<double>(report.sessions.size());
    means.eis /= n;
    means.eds /= n;
    means.gar /= n;
    means.rls /= n;
    report.means = means;
  }
  return report;
}

json report_to_json(const MetricsReport& report) {
  json doc;
  doc["sessions"] = json::array();
  for (const auto& row : report.sessions) {
    doc["sessions"].push_back({{"card_id", row.card_id},
                               {"eis", row.eis},
                               {"eds", row.eds},
                               {"gar", row.gar},
                               {"rls", row.rls},
                               {"turns", row.turns}});
  }
  if (report.means) {
    doc["means"] = {{"eis", report.means->eis},
                    {"eds", report.means->eds},
                    {"gar", report.means->gar},
                    {"rls", report.means->rls}};
  }
  doc["errors"] = report.errors;
  doc["error_messages"] = report.error_messages;
  return doc;
}

std::string render_report_table(const MetricsReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(16) << "card" << std::right << std::setw(9)
      << "EIS" << std::setw(9) << "EDS" << std::setw(9) << "GAR" << std::setw(9)
      << "RLS" << std::setw(8) << "turns" << '\n';
  for (const auto& row : report.sessions) {
    out << std::left << std::setw(16) << row.card_id << std::right
        << std::setw(9) << row.eis << std::setw(9) << row.eds << std::setw(9)
        << row.gar << std::setw(9) << row.rls << std::setw(8) << row.turns
        << '\n';
  }
  if (report.means) {
    out << std::left << std::setw(16) << "mean" << std::right << std::setw(9)
        << report.means->eis << std::setw(9) << report.means->eds
        << std::setw(9) << report.means->gar << std::setw(9)
        << report.means->rls << '\n';
  }
  if (report.errors > 0) {
    out << "failed sessions: " << report.errors << '\n';
  }
  return out.str();
}

EvalSession run_eval_session(const RoleCard& card, const PipelineConfig& config,
                             ChatBackend& counselor_backend,
                             ChatBackend& seeker_backend,
                             const EvalOptions& options) {
  const auto violations = validate_card(card);
  if (!violations.empty()) {
    throw PreconditionError("invalid role card '" + card.id +
                            "': " + violations.front());
  }
  EvalSession session;
  session.card_id = card.id;
  session.goals_total = static_cast<int>(card.goals.size());
  session.initial_score =
      state_score(card.initial_emotion, options.valence, options.policy);

  EmotionMemory memory(card.id, options.clock);
  Transcript history;
  std::map<GoalKind, bool> ledger;
  for (const auto& goal : card.goals) {
    ledger[goal.kind] = false;
  }

  double previous_score = session.initial_score;
  for (int turn = 0; turn < options.max_turns; ++turn) {
    EvalSeekerTurn seeker =
        run_eval_seeker(card, history, seeker_backend, options.seeker_agent);
    for (GoalKind kind : seeker.output.completed_goals) {
      ledger[kind] = true;
    }
    const double score =
        state_score(seeker.output.current_emotion, options.valence, options.policy);
    session.annotations.push_back(
        {turn, score, score - previous_score, seeker.risk});
    previous_score = score;
    history.push_back({Speaker::seeker, seeker.output.response});
    if (seeker.output.end_flag) {
      break;
    }

    if (config.mode == PipelineMode::agent) {
      TurnTrace trace = agent_mode_turn(history, memory, config,
                                        counselor_backend, options.counselor_agent);
      history.push_back({Speaker::counselor, trace.final_response});
    } else {
      CotRecord record =
          llm_mode_turn(history, config, counselor_backend, options.counselor_agent);
      history.push_back({Speaker::counselor, record.response});
    }
  }

  session.goals_completed = static_cast<int>(
      std::count_if(ledger.begin(), ledger.end(),
                    [](const auto& entry) { return entry.second; }));
  return session;
}

MetricsReport run_eval(const std::vector<RoleCard>& cards,
                       const PipelineConfig& config,
                       ChatBackend& counselor_backend, ChatBackend& seeker_backend,
                       const EvalOptions& options) {
  std::vector<EvalSession> sessions;
  std::size_t errors = 0;
  std::vector<std::string> error_messages;
  for (const auto& card : cards) {
    try {
      sessions.push_back(run_eval_session(card, config, counselor_backend,
                                          seeker_backend, options));
    } catch (const Error& ex) {
      ++errors;
      error_messages.push_back(card.id + ": " + ex.what());
    }
  }
  return summarize(sessions, errors, std::move(error_messages));
}

}  // namespace emosynth
