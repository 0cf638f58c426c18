#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emosynth/pipeline.hpp"
#include "emosynth/role_card.hpp"
#include "emosynth/synthesis.hpp"

namespace emosynth {

// Per-turn annotation of an evaluated session: signed emotion score, its
// shift from the previous turn, and the seeker-reported risk flag.
struct EvalTurnAnnotation {
  int turn_index = 0;
  double emotion_score = 0.0;  // in [-3, +3]
  double delta = 0.0;          // E_t - E_{t-1}; turn 1 uses the initial score
  double risk = 0.0;           // in [0, 1]

  bool operator==(const EvalTurnAnnotation&) const = default;
};

struct EvalSession {
  std::string card_id;
  double initial_score = 0.0;  // emotion score before the first turn
  std::vector<EvalTurnAnnotation> annotations;
  int goals_total = 0;
  int goals_completed = 0;

  std::size_t turn_count() const { return annotations.size(); }
};

// Overall emotional change: last score minus initial score.
double eis(const EvalSession& session);
// Mean of the negative emotion shifts only.
double eds(const EvalSession& session);
// Fraction of goals completed.
double gar(const EvalSession& session);
// Mean risk across turns.
double rls(const EvalSession& session);

struct SessionMetrics {
  std::string card_id;
  double eis = 0.0;
  double eds = 0.0;
  double gar = 0.0;
  double rls = 0.0;
  std::size_t turns = 0;
};

struct MetricsReport {
  std::vector<SessionMetrics> sessions;
  std::optional<SessionMetrics> means;  // absent when nothing succeeded
  std::size_t errors = 0;
  std::vector<std::string> error_messages;
};

MetricsReport summarize(const std::vector<EvalSession>& sessions,
                        std::size_t errors = 0,
                        std::vector<std::string> error_messages = {});

nlohmann::json report_to_json(const MetricsReport& report);
std::string render_report_table(const MetricsReport& report);

struct EvalOptions {
  int max_turns = 10;
  ValenceTable valence = default_valence();
  StateScorePolicy policy = StateScorePolicy::primary_only;
  AgentOptions seeker_agent;     // options for the simulated seeker
  AgentOptions counselor_agent;  // options for the evaluated pipeline
  std::function<std::int64_t()> clock;
};

// Runs one evaluated session: the simulated seeker annotates its emotion
// score and risk each turn while the configured pipeline produces counselor
// replies.
EvalSession run_eval_session(const RoleCard& card, const PipelineConfig& config,
                             ChatBackend& counselor_backend,
                             ChatBackend& seeker_backend,
                             const EvalOptions& options = {});

// Evaluates every card and aggregates the four metrics. Per-card failures
// are recorded and excluded from the means.
MetricsReport run_eval(const std::vector<RoleCard>& cards,
                       const PipelineConfig& config,
                       ChatBackend& counselor_backend, ChatBackend& seeker_backend,
                       const EvalOptions& options = {});

}  // namespace emosynth
