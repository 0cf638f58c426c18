// Acceptance suite: runs every contract criterion end to end and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "emosynth/assets.hpp"
#include "emosynth/config.hpp"
#include "emosynth/metrics.hpp"
#include "emosynth/synthesis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace emosynth;

namespace {

struct CriterionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define REQUIRE_C(cond)                                                     \
  do {                                                                      \
    if (!(cond)) {                                                          \
      throw CriterionFailure(std::string(__FILE__) + ":" +                  \
                             std::to_string(__LINE__) + ": " #cond);        \
    }                                                                       \
  } while (0)

#define REQUIRE_NEAR(a, b, tol)                                             \
  do {                                                                      \
    const double lhs = (a);                                                 \
    const double rhs = (b);                                                 \
    if (!(std::abs(lhs - rhs) <= (tol))) {                                  \
      std::ostringstream oss;                                               \
      oss << __FILE__ << ":" << __LINE__ << ": |" << lhs << " - " << rhs    \
          << "| > " << (tol);                                               \
      throw CriterionFailure(oss.str());                                    \
    }                                                                       \
  } while (0)

std::string fenced(const json& doc) {
  return "```json\n" + doc.dump() + "\n```";
}

json seeker_doc(const std::string& primary, const std::vector<std::string>& goals,
                const std::string& response) {
  return json{{"current_emotion", {{"primary", primary}, {"secondary", json::array()}}},
              {"triggering_events", json::array()},
              {"completed_goals", goals},
              {"response", response}};
}

json tracking_doc(const std::string& primary) {
  return json{{"current_emotion", {{"primary", primary}, {"secondary", json::array()}}},
              {"recent_shifts", "slightly lighter"},
              {"overall_trend", "improving"},
              {"causes", "being heard"}};
}

json counselor_doc(const std::string& draft) {
  return json{{"stage", "exploration"},
              {"strategies", json::array({"reflect feelings"})},
              {"draft", draft}};
}

json reactions_doc() {
  return json{{"reactions",
               json::array({json{{"behavior", "normal"}, {"reaction", "okay"}},
                            json{{"behavior", "silence"}, {"reaction", "..."}},
                            json{{"behavior", "excessive_sentimentality"},
                                 {"reaction", "too much"}},
                            json{{"behavior", "explosive_anger"},
                                 {"reaction", "leave me alone"}}})}};
}

json safety_doc(bool safe) {
  return json{{"safe", safe},
              {"risky_reactions", safe ? json::array() : json::array({3})},
              {"suggestions", safe ? "" : "soften the tone"}};
}

RoleCard fixture_card(const std::string& id, const std::string& topic = "Career") {
  RoleCard card;
  card.id = id;
  card.gender = "female";
  card.age = 31;
  card.occupation = "nurse";
  card.character = "caring but exhausted";
  card.language_style = "short sentences";
  card.hobbies = {"running"};
  card.problems = "burnout after night shifts";
  card.inner_monologue = "I cannot keep this up";
  card.topic = topic;
  card.goals = {{GoalKind::emotion, "feel lighter", false},
                {GoalKind::advice, "find a rest plan", false}};
  card.initial_emotion = EmotionState(parse_emotion("Sadness"));
  card.triggers = {{"schedule changes", EmotionState(parse_emotion("Anger"))}};
  return card;
}

std::string cot_reasoning() {
  return "[Emotion Shift Tracking]\nI notice the sadness easing.\n"
         "[Current Counseling Plan]\nI stay in exploration and reflect.\n"
         "[Safety Risk Analysis]\nNo predicted reaction escalates.\n"
         "[Integration]\nI reflect the feeling and invite more.";
}

// ---------------------------------------------------------------------------
// Criterion 1: metric exactness against an independent brute-force fold.

void criterion_metrics() {
  const auto start = std::chrono::steady_clock::now();

  auto build = [](double initial, const std::vector<double>& scores,
                  const std::vector<double>& risks, int total, int done) {
    EvalSession session;
    session.initial_score = initial;
    session.goals_total = total;
    session.goals_completed = done;
    double previous = initial;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      session.annotations.push_back({static_cast<int>(i), scores[i],
                                     scores[i] - previous,
                                     i < risks.size() ? risks[i] : 0.0});
      previous = scores[i];
    }
    return session;
  };

  // Hand fixtures.
  {
    std::vector<double> scores;
    double value = 0;
    for (double delta : {+1.0, -2.0, +1.0, -1.0}) {
      scores.push_back(value += delta);
    }
    REQUIRE_NEAR(eds(build(0, scores, {}, 2, 1)), 0.75, 0.0);
  }
  REQUIRE_NEAR(eis(build(-2, {0, 1, 2}, {}, 2, 1)), 4.0, 0.0);
  REQUIRE_NEAR(gar(build(0, {1}, {}, 2, 1)), 0.5, 0.0);
  REQUIRE_NEAR(rls(build(0, {1, 1, 1, 1}, {0, 0, 1, 0}, 2, 1)), 0.25, 0.0);

  std::mt19937_64 rng(1234);
  for (int i = 0; i < 1500; ++i) {
    const std::size_t turns = 1 + rng() % 24;
    const double initial = static_cast<double>(static_cast<int>(rng() % 7)) - 3.0;
    std::vector<double> scores, risks;
    for (std::size_t t = 0; t < turns; ++t) {
      scores.push_back(static_cast<double>(static_cast<int>(rng() % 7)) - 3.0);
      risks.push_back(rng() % 5 == 0 ? 1.0 : 0.0);
    }
    const int total = 1 + static_cast<int>(rng() % 3);
    const int done = static_cast<int>(rng() % (total + 1));
    const EvalSession session = build(initial, scores, risks, total, done);

    double drops = 0.0, risk_sum = 0.0, previous = initial;
    for (std::size_t t = 0; t < turns; ++t) {
      const double delta = scores[t] - previous;
      drops += std::max(0.0, -delta);
      risk_sum += risks[t];
      previous = scores[t];
    }
    REQUIRE_NEAR(eis(session), scores.back() - initial, 1e-12);
    REQUIRE_NEAR(eds(session), drops / static_cast<double>(turns), 1e-12);
    REQUIRE_NEAR(gar(session),
                 static_cast<double>(done) / static_cast<double>(total), 1e-12);
    REQUIRE_NEAR(rls(session), risk_sum / static_cast<double>(turns), 1e-12);
  }

  const auto elapsed = std::chrono::steady_clock::now() - start;
  REQUIRE_C(elapsed < std::chrono::seconds(5));
}

// ---------------------------------------------------------------------------
// Criterion 2: the Plutchik vocabulary and the signed scoring rule.

void criterion_vocabulary() {
  const std::vector<std::tuple<std::string, EmotionGroup, int>> expected = {
      {"Serenity", EmotionGroup::joy, 1},      {"Joy", EmotionGroup::joy, 2},
      {"Ecstasy", EmotionGroup::joy, 3},       {"Acceptance", EmotionGroup::trust, 1},
      {"Trust", EmotionGroup::trust, 2},       {"Admiration", EmotionGroup::trust, 3},
      {"Apprehension", EmotionGroup::fear, 1}, {"Fear", EmotionGroup::fear, 2},
      {"Terror", EmotionGroup::fear, 3},       {"Distraction", EmotionGroup::surprise, 1},
      {"Surprise", EmotionGroup::surprise, 2}, {"Amazement", EmotionGroup::surprise, 3},
      {"Pensiveness", EmotionGroup::sadness, 1}, {"Sadness", EmotionGroup::sadness, 2},
      {"Grief", EmotionGroup::sadness, 3},     {"Boredom", EmotionGroup::disgust, 1},
      {"Disgust", EmotionGroup::disgust, 2},   {"Loathing", EmotionGroup::disgust, 3},
      {"Annoyance", EmotionGroup::anger, 1},   {"Anger", EmotionGroup::anger, 2},
      {"Rage", EmotionGroup::anger, 3},        {"Interest", EmotionGroup::anticipation, 1},
      {"Anticipation", EmotionGroup::anticipation, 2},
      {"Vigilance", EmotionGroup::anticipation, 3},
  };
  REQUIRE_C(expected.size() == 24);

  const std::set<EmotionGroup> positive = {EmotionGroup::joy, EmotionGroup::trust,
                                           EmotionGroup::anticipation};
  const std::set<EmotionGroup> negative = {EmotionGroup::fear, EmotionGroup::sadness,
                                           EmotionGroup::disgust, EmotionGroup::anger};
  int assertions = 0;
  for (const auto& [label, group, intensity] : expected) {
    const EmotionTerm term = parse_emotion(label);
    REQUIRE_C(term.group == group && term.intensity == intensity);
    ++assertions;
    int expected_score = 0;
    if (positive.count(group)) expected_score = intensity;
    if (negative.count(group)) expected_score = -intensity;
    REQUIRE_C(score(term) == expected_score);
    ++assertions;
  }
  REQUIRE_C(assertions == 48);
}

// ---------------------------------------------------------------------------
// Criterion 3: regenerate-loop semantics over every verdict pattern.

struct LoopExpectation {
  int drafts = 1;
  int regens = 0;
  bool unresolved = false;
  int verdicts = 0;
};

// Reference fold: initial draft plus up to `cap` redrafts, first safe verdict
// wins, the final redraft at the cap goes out unchecked.
LoopExpectation expected_loop(const std::vector<bool>& safeness, int cap) {
  LoopExpectation out;
  for (std::size_t i = 0;; ++i) {
    out.verdicts = static_cast<int>(i) + 1;
    if (safeness.at(i)) {
      return out;
    }
    ++out.drafts;
    ++out.regens;
    if (out.regens == cap) {
      out.unresolved = true;
      return out;
    }
  }
}

void criterion_loop_semantics() {
  const auto start = std::chrono::steady_clock::now();
  const Transcript history = {{Speaker::seeker, "rough week"}};

  int cases = 0;
  for (int length = 1; length <= 4; ++length) {
    for (int bits = 0; bits < (1 << length); ++bits) {
      std::vector<bool> pattern;
      for (int i = 0; i < length; ++i) {
        pattern.push_back((bits >> i) & 1);
      }
      // The scripted safety agent keeps answering its last verdict if the
      // loop asks beyond the pattern.
      std::vector<bool> extended = pattern;
      while (extended.size() < 8) {
        extended.push_back(pattern.back());
      }

      for (int cap = 1; cap <= 3; ++cap) {
        const LoopExpectation expect = expected_loop(extended, cap);

        ScriptedBackend backend;
        backend.push_content(fenced(counselor_doc("draft 1")));
        int drafts = 1, regens = 0;
        for (int j = 0;; ++j) {
          backend.push_content(fenced(reactions_doc()));
          backend.push_content(fenced(safety_doc(extended[j])));
          if (extended[j]) break;
          ++drafts;
          ++regens;
          backend.push_content(
              fenced(counselor_doc("draft " + std::to_string(drafts))));
          if (regens == cap) break;
        }

        PipelineConfig config;
        config.em_enabled = false;
        config.max_regenerations = cap;
        EmotionMemory memory;
        const TurnTrace trace = agent_mode_turn(history, memory, config, backend);

        REQUIRE_C(static_cast<int>(trace.drafts.size()) ==
                  trace.regeneration_count + 1);
        REQUIRE_C(static_cast<int>(trace.drafts.size()) == expect.drafts);
        REQUIRE_C(trace.regeneration_count == expect.regens);
        REQUIRE_C(trace.risk_unresolved == expect.unresolved);
        REQUIRE_C(static_cast<int>(trace.verdicts.size()) == expect.verdicts);
        REQUIRE_C(static_cast<int>(trace.drafts.size()) <= cap + 1);
        REQUIRE_C(trace.final_response == trace.drafts.back().draft);
        // First safe verdict ends the loop.
        for (std::size_t v = 0; v < trace.verdicts.size(); ++v) {
          if (trace.verdicts[v].safe) {
            REQUIRE_C(v + 1 == trace.verdicts.size());
            REQUIRE_C(trace.drafts.size() == v + 1);
          }
        }
        REQUIRE_C(backend.remaining() == 0);
        ++cases;
      }
    }
  }
  REQUIRE_C(cases == 30 * 3);
  REQUIRE_C(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
}

// ---------------------------------------------------------------------------
// Criterion 4: stage order and the EM/RC ablation contracts over 10 turns.

void criterion_stage_order() {
  auto run_ten_turns = [](bool em, bool rc) {
    ScriptedBackend backend;
    for (int t = 0; t < 10; ++t) {
      backend.push_content(
          fenced(seeker_doc("Pensiveness", {}, "turn " + std::to_string(t))));
      if (em) backend.push_content(fenced(tracking_doc("Pensiveness")));
      backend.push_content(fenced(counselor_doc("reply " + std::to_string(t))));
      if (rc) {
        backend.push_content(fenced(reactions_doc()));
        backend.push_content(fenced(safety_doc(true)));
      }
    }
    PipelineConfig config;
    config.em_enabled = em;
    config.rc_enabled = rc;
    SessionOptions options;
    options.clock = []() -> std::int64_t { return 0; };
    EmotionMemory memory;
    options.memory_out = &memory;
    const DialogueSession session =
        run_session(fixture_card("ablate"), config, backend, 10, options);
    REQUIRE_C(session.terminated_by == Termination::max_turns);
    return std::make_pair(session, memory);
  };

  // Full pipeline: per turn the tool events are exactly [tracking, safety+].
  {
    const auto [session, memory] = run_ten_turns(true, true);
    int counselor_turns = 0;
    for (const auto& turn : session.turns) {
      if (!turn.trace) continue;
      ++counselor_turns;
      const auto& events = turn.trace->tool_events;
      REQUIRE_C(events.size() == 2);
      REQUIRE_C(events[0].call.at("name") == "emotion_tracking");
      REQUIRE_C(events[1].call.at("name") == "safety_analysis");
    }
    REQUIRE_C(counselor_turns == 10);
    REQUIRE_C(memory.size() == 10);
  }

  // Without EM: zero tracking events, zero memory growth.
  {
    const auto [session, memory] = run_ten_turns(false, true);
    for (const auto& turn : session.turns) {
      if (!turn.trace) continue;
      REQUIRE_C(!turn.trace->analysis.has_value());
      for (const auto& event : turn.trace->tool_events) {
        REQUIRE_C(event.call.at("name") != "emotion_tracking");
      }
    }
    REQUIRE_C(memory.size() == 0);
  }

  // Without RC: zero safety events.
  {
    const auto [session, memory] = run_ten_turns(true, false);
    for (const auto& turn : session.turns) {
      if (!turn.trace) continue;
      REQUIRE_C(turn.trace->verdicts.empty());
      for (const auto& event : turn.trace->tool_events) {
        REQUIRE_C(event.call.at("name") != "safety_analysis");
      }
    }
    REQUIRE_C(memory.size() == 10);
  }
}

// ---------------------------------------------------------------------------
// Criterion 5: the reaction-prediction prompt never sees role-card values.

void criterion_information_barrier() {
  std::mt19937_64 rng(555);
  auto token = [&]() {
    std::string out = "qx";
    for (int i = 0; i < 12; ++i) {
      out += static_cast<char>('a' + rng() % 26);
    }
    return out;
  };

  const Transcript history = {
      {Speaker::seeker, "everything feels heavier than it should"},
      {Speaker::counselor, "what carries the most weight right now"},
      {Speaker::seeker, "probably the mornings"}};
  const std::string draft = "would you walk me through one of those mornings";

  for (int i = 0; i < 20; ++i) {
    RoleCard card = fixture_card("barrier" + std::to_string(i));
    card.gender = token();
    card.age = 18 + static_cast<int>(rng() % 60);
    card.occupation = token();
    card.character = token();
    card.language_style = token();
    card.hobbies = {token(), token()};
    card.problems = token();
    card.inner_monologue = token();
    card.goals[0].description = token();
    card.goals[1].description = token();
    card.triggers = {{token(), EmotionState(parse_emotion("Rage"))}};

    const std::string prompt = build_reaction_prompt(history, draft);
    std::vector<std::string> values = {card.id,
                                       card.gender,
                                       std::to_string(card.age),
                                       card.occupation,
                                       card.character,
                                       card.language_style,
                                       card.hobbies[0],
                                       card.hobbies[1],
                                       card.problems,
                                       card.inner_monologue,
                                       card.goals[0].description,
                                       card.goals[1].description,
                                       card.triggers[0].event};
    for (const auto& value : values) {
      REQUIRE_C(prompt.find(value) == std::string::npos);
    }
  }
}

// ---------------------------------------------------------------------------
// Criterion 6: the screening truth table.

void criterion_screening() {
  auto session_with = [](const std::string& primary,
                         const std::vector<std::string>& secondary, int goals) {
    DialogueSession session;
    session.card_id = "screen";
    session.topic = "Career";
    SeekerOutput annotation;
    std::vector<EmotionTerm> terms;
    for (const auto& label : secondary) {
      terms.push_back(parse_emotion(label));
    }
    annotation.current_emotion = EmotionState(parse_emotion(primary), terms);
    annotation.response = "closing";
    session.turns.push_back({Speaker::seeker, annotation.response, annotation,
                             std::nullopt, std::nullopt});
    session.goal_ledger = {{"emotion", goals >= 1}, {"advice", goals >= 2}};
    session.terminated_by = Termination::end_token;
    return session;
  };

  int checked = 0;
  for (int goals = 0; goals <= 2; ++goals) {
    // Positive final state: accepted iff at least one goal completed.
    const ScreenResult positive = screen(session_with("Joy", {"Acceptance"}, goals));
    REQUIRE_C(positive.accepted == (goals >= 1));
    if (!positive.accepted) {
      REQUIRE_C(positive.reason == kRejectNoGoal);
    }
    // Neutral primary with a negative secondary: always rejected on emotion.
    const ScreenResult mixed =
        screen(session_with("Surprise", {"Pensiveness"}, goals));
    REQUIRE_C(!mixed.accepted && mixed.reason == kRejectNegativeEmotion);
    // Negative primary: always rejected on emotion.
    const ScreenResult negative = screen(session_with("Grief", {}, goals));
    REQUIRE_C(!negative.accepted && negative.reason == kRejectNegativeEmotion);
    checked += 3;
  }
  REQUIRE_C(checked == 9);
}

// ---------------------------------------------------------------------------
// Criterion 7: end-to-end determinism of the CLI under a scripted backend.

int run_cli(const std::string& args, const fs::path& out, const fs::path& err) {
  const std::string command = std::string(EMOSYNTH_CLI_PATH) + " " + args + " >" +
                              out.string() + " 2>" + err.string();
  return WEXITSTATUS(std::system(command.c_str()));
}

json session_script() {
  json responses = json::array();
  responses.push_back(
      {{"content", fenced(seeker_doc("Sadness", {}, "I feel stuck lately"))}});
  responses.push_back({{"content", fenced(tracking_doc("Sadness"))}});
  responses.push_back(
      {{"content", fenced(counselor_doc("Tell me more about stuck"))}});
  responses.push_back({{"content", fenced(reactions_doc())}});
  responses.push_back({{"content", fenced(safety_doc(true))}});
  responses.push_back({{"content", fenced(seeker_doc(
                           "Serenity", {"emotion", "advice"}, "Thank you END"))}});
  return json{{"responses", responses}};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    files[fs::relative(entry.path(), root).string()] =
        std::string(std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>());
  }
  return files;
}

void criterion_determinism() {
  const fs::path root =
      fs::temp_directory_path() / ("emosynth_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);

  std::vector<RoleCard> cards;
  const std::vector<std::string> topics = {"Career", "Family", "Growth", "Marriage",
                                           "Emotion"};
  for (int i = 0; i < 5; ++i) {
    cards.push_back(fixture_card("fix" + std::to_string(i), topics[i]));
  }
  save_cards_jsonl(cards, (root / "cards.jsonl").string());

  std::ofstream(root / "script.json") << session_script().dump();
  json compile_script = {{"responses", json::array()}};
  for (int i = 0; i < 5; ++i) {
    compile_script["responses"].push_back({{"content", cot_reasoning()}});
  }
  std::ofstream(root / "compile_script.json") << compile_script.dump();

  const json config = {{"backends",
                        {{"default",
                          {{"type", "scripted"},
                           {"script", (root / "script.json").string()}}}}},
                       {"synthesis", {{"max_turns", 4}, {"parallelism", 2}}}};
  std::ofstream(root / "config.json") << config.dump();
  const json llm_config = {{"backends",
                            {{"default",
                              {{"type", "scripted"},
                               {"script", (root / "compile_script.json").string()}}}}}};
  std::ofstream(root / "config_llm.json") << llm_config.dump();

  auto run_pass = [&](const std::string& tag) {
    const fs::path out = root / tag;
    REQUIRE_C(run_cli("--config " + (root / "config.json").string() +
                          " synthesize --cards " + (root / "cards.jsonl").string() +
                          " --out " + (out / "corpus").string(),
                      root / (tag + "_synth.out"), root / (tag + "_synth.err")) == 0);
    REQUIRE_C(run_cli("--config " + (root / "config.json").string() +
                          " export --sessions " +
                          (out / "corpus" / "sessions").string() +
                          " --format agent --out " + (out / "train").string(),
                      root / (tag + "_exa.out"), root / (tag + "_exa.err")) == 0);
    REQUIRE_C(run_cli("--config " + (root / "config_llm.json").string() +
                          " export --sessions " +
                          (out / "corpus" / "sessions").string() +
                          " --format llm --out " + (out / "train").string(),
                      root / (tag + "_exl.out"), root / (tag + "_exl.err")) == 0);
    return read_tree(out);
  };

  const auto first = run_pass("a");
  const auto second = run_pass("b");
  REQUIRE_C(first.size() > 0);
  REQUIRE_C(first == second);  // byte-identical sessions, exports, stats

  // Hand-computed statistics for the fixture corpus: every session has two
  // exchanges-worth of seeker turns (2nd ends the dialogue) and utterance
  // lengths 19 + 24 + 9 = 52 characters over 3 utterances.
  const json stats = json::parse(first.at("corpus/stats.json"));
  REQUIRE_C(stats.at("n_dialogues") == 5);
  REQUIRE_NEAR(stats.at("avg_turns").get<double>(), 2.0, 1e-12);
  REQUIRE_NEAR(stats.at("avg_len").get<double>(), 52.0 / 3.0, 1e-12);

  fs::remove_all(root);
}

// ---------------------------------------------------------------------------
// Criterion 8: format round-trips.

void criterion_round_trips() {
  // Role cards.
  for (int i = 0; i < 5; ++i) {
    const RoleCard card = fixture_card("rt" + std::to_string(i),
                                       topic_labels()[i % topic_labels().size()]);
    REQUIRE_C(card_from_json(card_to_json(card)) == card);
  }

  // A full scripted session: traces, transcripts, JSONL exports.
  ScriptedBackend backend;
  backend.push_content(fenced(seeker_doc("Fear", {}, "opening line")));
  backend.push_content(fenced(tracking_doc("Fear")));
  backend.push_content(fenced(counselor_doc("first draft")));
  backend.push_content(fenced(reactions_doc()));
  backend.push_content(fenced(safety_doc(false)));
  backend.push_content(fenced(counselor_doc("softer draft")));
  backend.push_content(fenced(reactions_doc()));
  backend.push_content(fenced(safety_doc(true)));
  backend.push_content(
      fenced(seeker_doc("Serenity", {"emotion"}, "much better END")));
  const DialogueSession session =
      run_session(fixture_card("rt_session"), PipelineConfig{}, backend, 4);
  REQUIRE_C(session.terminated_by == Termination::end_token);
  REQUIRE_C(session_from_json(session_to_json(session)) == session);

  // Tool transcripts.
  const TurnTrace& trace = *session.turns[1].trace;
  const ToolTranscript transcript = parse_tool_transcript(render_tool_transcript(trace));
  REQUIRE_C(transcript.tool_events == trace.tool_events);
  REQUIRE_C(transcript.final_response == trace.final_response);

  // Chain-of-thought records.
  const CotRecord record{"I see fear losing its grip.", "Comforting, then action.",
                         "No reaction escalates.", "Validate, then one small step.",
                         "You noticed the shift yourself."};
  REQUIRE_C(parse_cot(serialize_cot(record)) == record);

  // Training JSONL rows re-parse to the same messages.
  const fs::path dir =
      fs::temp_directory_path() / ("emosynth_rt_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const AgentModeExport exported = export_agent_mode({session});
  REQUIRE_C(exported.tracking.size() == 1);
  REQUIRE_C(exported.safety.size() == 2);  // one verdict per checked draft
  for (const auto& [name, rows] :
       std::map<std::string, const std::vector<json>*>{
           {"tracking", &exported.tracking},
           {"counselor", &exported.counselor},
           {"safety", &exported.safety},
           {"seeker", &exported.seeker}}) {
    const std::string path = (dir / (name + ".jsonl")).string();
    write_jsonl(*rows, path);
    REQUIRE_C(read_jsonl(path) == *rows);
  }

  ScriptedBackend compiler;
  compiler.push_content(cot_reasoning());
  const LlmModeExport llm = export_llm_mode({session}, compiler);
  REQUIRE_C(llm.rows.size() == 1);
  const CotRecord parsed = parse_cot(
      llm.rows[0].at("messages")[1].at("content").get<std::string>());
  REQUIRE_C(parsed.response == trace.final_response);
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// Criterion 9 (optional): live smoke against an OpenAI-compatible endpoint.

bool criterion_live_smoke(std::string& note) {
  const char* base_url = std::getenv("EMOSYNTH_LIVE_BASE_URL");
  if (!base_url || std::string(base_url).empty()) {
    note = "EMOSYNTH_LIVE_BASE_URL not set";
    return false;
  }
  HttpBackendConfig http;
  http.base_url = base_url;
  if (const char* model_env = std::getenv("EMOSYNTH_LIVE_MODEL")) {
    note = model_env;
  }
  if (const char* key = std::getenv("EMOSYNTH_LIVE_API_KEY")) {
    http.api_key = key;
  }
  HttpBackend backend(http);

  SessionOptions options;
  if (const char* model_env = std::getenv("EMOSYNTH_LIVE_MODEL")) {
    options.agent.model = model_env;
  }
  const DialogueSession session =
      run_session(fixture_card("live"), PipelineConfig{}, backend, 3, options);
  REQUIRE_C(session.terminated_by != Termination::error);
  bool has_trace = false;
  for (const auto& turn : session.turns) {
    if (turn.trace) {
      has_trace = true;
      REQUIRE_C(!turn.trace->drafts.empty());
    }
  }
  REQUIRE_C(has_trace);
  const ScreenResult verdict = screen(session);
  note = std::string("screening: ") + (verdict.accepted ? "accept" : verdict.reason);
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string label;
    std::function<void()> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "metric exactness vs. brute-force fold", criterion_metrics},
      {2, "Plutchik vocabulary and signed scoring", criterion_vocabulary},
      {3, "regenerate-loop semantics", criterion_loop_semantics},
      {4, "stage order and EM/RC ablations", criterion_stage_order},
      {5, "reaction-prediction information barrier", criterion_information_barrier},
      {6, "screening truth table", criterion_screening},
      {7, "end-to-end CLI determinism", criterion_determinism},
      {8, "format round-trips", criterion_round_trips},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    try {
      criterion.body();
      std::cout << "[PASS] criterion " << criterion.id << ": " << criterion.label
                << "\n";
    } catch (const std::exception& ex) {
      ++failures;
      std::cout << "[FAIL] criterion " << criterion.id << ": " << criterion.label
                << " - " << ex.what() << "\n";
    }
  }

  try {
    std::string note;
    if (criterion_live_smoke(note)) {
      std::cout << "[PASS] criterion 9: live smoke (" << note << ")\n";
    } else {
      std::cout << "[SKIP] criterion 9: live smoke (" << note << ")\n";
    }
  } catch (const std::exception& ex) {
    ++failures;
    std::cout << "[FAIL] criterion 9: live smoke - " << ex.what() << "\n";
  }

  return failures == 0 ? 0 : 1;
}
