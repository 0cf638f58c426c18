#include <algorithm>
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "emosynth/config.hpp"
#include "emosynth/metrics.hpp"
#include "emosynth/synthesis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace emosynth;

namespace {

std::mutex g_log_mutex;
volatile std::sig_atomic_t g_cancelled = 0;

void handle_signal(int) { g_cancelled = 1; }

void log_event(json fields) {
  std::lock_guard lock(g_log_mutex);
  std::cerr << fields.dump() << '\n';
}

struct CommonFlags {
  std::string config_path;
  std::string cards_path;
  std::string out_dir;
  std::string mode;
  bool no_em = false;
  bool no_rc = false;
  int max_turns = -1;
  std::int64_t seed = -1;
  int parallelism = -1;
};

void add_pipeline_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--mode", flags.mode, "Pipeline mode: agent or llm");
  cmd->add_flag("--no-em", flags.no_em, "Disable the emotion management module");
  cmd->add_flag("--no-rc", flags.no_rc, "Disable the risk control module");
}

// Flags win over config-file values.
EngineConfig wire_config(const CommonFlags& flags) {
  EngineConfig config =
      flags.config_path.empty() ? default_config() : load_config(flags.config_path);
  if (!flags.mode.empty()) {
    config.pipeline.mode = parse_mode(flags.mode);
  }
  if (flags.no_em) {
    config.pipeline.em_enabled = false;
  }
  if (flags.no_rc) {
    config.pipeline.rc_enabled = false;
  }
  if (flags.max_turns > 0) {
    config.synthesis.max_turns = flags.max_turns;
    config.eval.max_turns = flags.max_turns;
  }
  if (flags.seed >= 0) {
    config.synthesis.seed = static_cast<std::uint64_t>(flags.seed);
    config.eval.seed = static_cast<std::uint64_t>(flags.seed);
  }
  if (flags.parallelism > 0) {
    config.synthesis.parallelism = flags.parallelism;
  }
  if (!flags.out_dir.empty()) {
    config.synthesis.out_dir = flags.out_dir;
  }
  if (config.emotion_vocabulary) {
    load_vocabulary(*config.emotion_vocabulary);
  }
  if (config.topic_labels) {
    load_topics(*config.topic_labels);
  }
  return config;
}

TemplateSet wire_templates(const EngineConfig& config) {
  return config.template_dir ? TemplateSet::load(*config.template_dir)
                             : TemplateSet::builtin();
}

AgentOptions agent_options(const EngineConfig& config, const TemplateSet& templates,
                           const BackendProfile& profile) {
  AgentOptions options;
  options.templates = &templates;
  options.model = profile.model;
  options.temperature = profile.temperature;
  options.behaviors = config.pipeline.reaction_behaviors;
  return options;
}

int cmd_synthesize(const CommonFlags& flags, std::optional<std::size_t> sample_n) {
  const EngineConfig config = wire_config(flags);
  const TemplateSet templates = wire_templates(config);
  const ValenceTable valence = valence_from(config);

  std::vector<RoleCard> cards = load_cards_jsonl(flags.cards_path);
  if (sample_n) {
    cards = stratified_sample(cards, *sample_n, config.synthesis.seed);
  }
  if (cards.empty()) {
    std::cerr << "no role cards in " << flags.cards_path << '\n';
    return 1;
  }

  const BackendProfile& profile = profile_or_default(config, "default");
  const BackendFactory factory = make_backend_factory(profile);
  const auto clock = clock_for(profile);

  const fs::path out_root(config.synthesis.out_dir);
  const fs::path accepted_dir = out_root / "sessions";
  const fs::path quarantine_dir = out_root / "quarantine";
  fs::create_directories(accepted_dir);
  fs::create_directories(quarantine_dir);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> accepted{0};
  std::atomic<std::size_t> rejected{0};
  std::atomic<std::size_t> failed{0};

  auto worker = [&]() {
    while (!g_cancelled) {
      const std::size_t index = next.fetch_add(1);
      if (index >= cards.size()) {
        break;
      }
      const RoleCard& card = cards[index];
      try {
        auto backend = factory();
        SessionOptions options;
        options.agent = agent_options(config, templates, profile);
        options.clock = clock;
        EmotionMemory memory;
        options.memory_out = &memory;
        DialogueSession session =
            run_session(card, config.pipeline, *backend,
                        config.synthesis.max_turns, options);
        const ScreenResult verdict =
            session.terminated_by == Termination::error
                ? ScreenResult{false, "session_error: " + session.error_message}
                : screen(session, valence);
        const fs::path dir = verdict.accepted ? accepted_dir : quarantine_dir;
        json doc = session_to_json(session);
        if (!verdict.accepted) {
          doc["quarantine_reason"] = verdict.reason;
        }
        {
          std::ofstream out(dir / (card.id + ".json"));
          out << doc.dump(2) << '\n';
        }
        if (memory.size() > 0) {
          memory.save_jsonl((dir / (card.id + ".memory.jsonl")).string());
        }
        if (verdict.accepted) {
          ++accepted;
        } else {
          ++rejected;
        }
        log_event({{"event", "session"},
                   {"session", card.id},
                   {"accepted", verdict.accepted},
                   {"reason", verdict.reason},
                   {"terminated_by",
                    std::string(termination_name(session.terminated_by))}});
      } catch (const Error& ex) {
        ++failed;
        log_event({{"event", "session_failed"},
                   {"session", card.id},
                   {"error", ex.what()}});
      }
    }
  };

  const int pool_size =
      std::max(1, std::min<int>(config.synthesis.parallelism,
                                static_cast<int>(cards.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < pool_size; ++i) {
    pool.emplace_back(worker);
  }
  for (auto& thread : pool) {
    thread.join();
  }
  if (g_cancelled) {
    log_event({{"event", "cancelled"},
               {"remaining", cards.size() - std::min(cards.size(), next.load())}});
  }

  std::vector<DialogueSession> kept = load_sessions_dir(accepted_dir.string());
  if (kept.empty()) {
    std::cerr << "no sessions passed screening (" << rejected.load()
              << " rejected, " << failed.load() << " failed)\n";
    return 1;
  }
  const CorpusStats stats = compute_stats(kept);
  {
    std::ofstream out(out_root / "stats.json");
    out << stats_to_json(stats).dump(2) << '\n';
  }
  std::cout << "accepted " << stats.n_dialogues << " sessions (" << rejected.load()
            << " quarantined, " << failed.load() << " failed) | avg_turns "
            << stats.avg_turns << " | avg_len " << stats.avg_len << '\n';
  return g_cancelled ? 130 : 0;
}

int cmd_export(const std::string& sessions_dir, const std::string& format,
               const std::string& out_dir, const CommonFlags& flags) {
  const EngineConfig config = wire_config(flags);
  const TemplateSet templates = wire_templates(config);

  std::vector<DialogueSession> sessions = load_sessions_dir(sessions_dir);
  if (sessions.empty()) {
    std::cerr << "no sessions found in " << sessions_dir << '\n';
    return 1;
  }
  fs::create_directories(out_dir);
  const fs::path out_root(out_dir);

  const BackendProfile& profile = profile_or_default(config, "default");
  AgentOptions options = agent_options(config, templates, profile);

  if (format == "agent") {
    const AgentModeExport exported = export_agent_mode(sessions, options);
    write_jsonl(exported.tracking, (out_root / "agent_tracking.jsonl").string());
    write_jsonl(exported.counselor, (out_root / "agent_counselor.jsonl").string());
    write_jsonl(exported.safety, (out_root / "agent_safety.jsonl").string());
    write_jsonl(exported.seeker, (out_root / "agent_seeker.jsonl").string());
    std::cout << "wrote " << exported.tracking.size() << " tracking, "
              << exported.counselor.size() << " counselor, "
              << exported.safety.size() << " safety, " << exported.seeker.size()
              << " seeker samples\n";
    return 0;
  }
  if (format == "llm") {
    auto backend = make_backend_factory(profile)();
    const LlmModeExport exported = export_llm_mode(sessions, *backend, options);
    write_jsonl(exported.rows, (out_root / "llm_mode.jsonl").string());
    std::cout << "wrote " << exported.rows.size() << " samples ("
              << exported.skipped << " turns skipped)\n";
    return 0;
  }
  std::cerr << "unknown export format: " << format << " (expected agent or llm)\n";
  return 2;
}

int cmd_eval(const CommonFlags& flags, std::size_t n_override) {
  const EngineConfig config = wire_config(flags);
  const TemplateSet templates = wire_templates(config);

  std::vector<RoleCard> cards = load_cards_jsonl(flags.cards_path);
  if (cards.empty()) {
    std::cerr << "no role cards in " << flags.cards_path << '\n';
    return 1;
  }
  const std::size_t n =
      n_override > 0 ? n_override : std::min(config.eval.n_cards, cards.size());
  std::mt19937_64 rng(config.eval.seed);
  std::shuffle(cards.begin(), cards.end(), rng);
  if (n < cards.size()) {
    cards.resize(n);
  }

  const BackendProfile& counselor_profile = profile_or_default(config, "default");
  const BackendProfile& seeker_profile = profile_or_default(config, "seeker");
  const BackendFactory counselor_factory = make_backend_factory(counselor_profile);
  const BackendFactory seeker_factory = make_backend_factory(seeker_profile);

  EvalOptions options;
  options.max_turns = config.eval.max_turns;
  options.valence = valence_from(config);
  options.policy = config.state_score_policy;
  options.seeker_agent = agent_options(config, templates, seeker_profile);
  options.counselor_agent = agent_options(config, templates, counselor_profile);
  options.clock = clock_for(counselor_profile);

  std::vector<EvalSession> sessions;
  std::size_t errors = 0;
  std::vector<std::string> error_messages;
  for (const auto& card : cards) {
    try {
      auto counselor_backend = counselor_factory();
      auto seeker_backend = seeker_factory();
      sessions.push_back(run_eval_session(card, config.pipeline,
                                          *counselor_backend, *seeker_backend,
                                          options));
      log_event({{"event", "eval_session"}, {"session", card.id}});
    } catch (const Error& ex) {
      ++errors;
      error_messages.push_back(card.id + ": " + ex.what());
      log_event({{"event", "eval_session_failed"},
                 {"session", card.id},
                 {"error", ex.what()}});
    }
  }

  const MetricsReport report = summarize(sessions, errors, error_messages);
  const fs::path out_root(config.synthesis.out_dir);
  fs::create_directories(out_root);
  {
    std::ofstream out(out_root / "report.json");
    out << report_to_json(report).dump(2) << '\n';
  }
  std::cout << render_report_table(report);
  return errors > 0 ? 1 : 0;
}

int cmd_stats(const std::string& sessions_dir) {
  const std::vector<DialogueSession> sessions = load_sessions_dir(sessions_dir);
  if (sessions.empty()) {
    std::cerr << "no sessions found in " << sessions_dir << '\n';
    return 1;
  }
  const CorpusStats stats = compute_stats(sessions);
  std::cout << "n_dialogues: " << stats.n_dialogues << '\n'
            << "avg_turns: " << stats.avg_turns << '\n'
            << "avg_len: " << stats.avg_len << '\n'
            << "topics:\n";
  for (const auto& [topic, count] : stats.topic_histogram) {
    std::cout << "  " << topic << ": " << count << '\n';
  }
  return 0;
}

int cmd_derive_cards(const CommonFlags& flags, const std::string& seeds_path,
                     const std::string& out_path) {
  const EngineConfig config = wire_config(flags);
  const TemplateSet templates = wire_templates(config);
  const BackendProfile& profile = profile_or_default(config, "default");
  auto backend = make_backend_factory(profile)();
  AgentOptions options = agent_options(config, templates, profile);

  std::vector<RoleCard> cards;
  std::size_t failed = 0;
  std::size_t line_no = 0;
  for (const auto& doc : read_jsonl(seeds_path)) {
    ++line_no;
    try {
      Transcript seed;
      for (const auto& turn : doc.at("turns")) {
        seed.push_back({parse_speaker(turn.at("speaker").get<std::string>()),
                        turn.at("text").get<std::string>()});
      }
      cards.push_back(derive_role_card(seed, *backend, options));
      log_event({{"event", "card_derived"}, {"session", cards.back().id}});
    } catch (const std::exception& ex) {
      ++failed;
      log_event({{"event", "card_failed"},
                 {"line", line_no},
                 {"error", ex.what()}});
    }
  }
  if (cards.empty()) {
    std::cerr << "no cards derived from " << seeds_path << '\n';
    return 1;
  }
  save_cards_jsonl(cards, out_path);
  std::cout << "derived " << cards.size() << " cards (" << failed << " failed)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  CLI::App app{"Counseling dialogue synthesis and evaluation engine"};
  app.require_subcommand(1);

  CommonFlags flags;
  app.add_option("--config", flags.config_path, "Engine config file (JSON)");

  // synthesize
  auto* synthesize = app.add_subcommand(
      "synthesize", "Run role-play sessions, screen them, and write the corpus");
  synthesize->add_option("--cards", flags.cards_path, "Role cards (JSONL)")
      ->required();
  synthesize->add_option("--out", flags.out_dir, "Output directory");
  synthesize->add_option("--max-turns", flags.max_turns, "Seeker turn budget");
  synthesize->add_option("--seed", flags.seed, "Sampling seed");
  synthesize->add_option("--parallelism", flags.parallelism,
                         "Concurrent sessions");
  std::size_t sample_n = 0;
  synthesize->add_option("--sample", sample_n,
                         "Stratified-sample this many cards first");
  add_pipeline_flags(synthesize, flags);

  // export
  auto* export_cmd =
      app.add_subcommand("export", "Write training JSONL from stored sessions");
  std::string sessions_dir;
  std::string format;
  std::string export_out = "export";
  export_cmd->add_option("--sessions", sessions_dir, "Accepted sessions directory")
      ->required();
  export_cmd->add_option("--format", format, "agent or llm")->required();
  export_cmd->add_option("--out", export_out, "Output directory");

  // eval
  auto* eval_cmd = app.add_subcommand(
      "eval", "Run evaluated sessions and report the four session metrics");
  eval_cmd->add_option("--cards", flags.cards_path, "Role cards (JSONL)")
      ->required();
  eval_cmd->add_option("--out", flags.out_dir, "Output directory");
  std::size_t eval_n = 0;
  eval_cmd->add_option("--n", eval_n, "Number of cards to evaluate");
  eval_cmd->add_option("--seed", flags.seed, "Sampling seed");
  eval_cmd->add_option("--max-turns", flags.max_turns, "Seeker turn budget");
  add_pipeline_flags(eval_cmd, flags);

  // stats
  auto* stats_cmd =
      app.add_subcommand("stats", "Print corpus statistics for stored sessions");
  std::string stats_dir;
  stats_cmd->add_option("--sessions", stats_dir, "Sessions directory")->required();

  // derive-cards
  auto* derive_cmd = app.add_subcommand(
      "derive-cards", "Derive role cards from seed dialogues via the backend");
  std::string seeds_path;
  std::string derive_out = "cards.jsonl";
  derive_cmd->add_option("--seeds", seeds_path, "Seed dialogues (JSONL)")
      ->required();
  derive_cmd->add_option("--out", derive_out, "Output cards file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synthesize) {
      return cmd_synthesize(
          flags, sample_n > 0 ? std::optional<std::size_t>(sample_n) : std::nullopt);
    }
    if (*export_cmd) {
      return cmd_export(sessions_dir, format, export_out, flags);
    }
    if (*eval_cmd) {
      return cmd_eval(flags, eval_n);
    }
    if (*stats_cmd) {
      return cmd_stats(stats_dir);
    }
    if (*derive_cmd) {
      return cmd_derive_cards(flags, seeds_path, derive_out);
    }
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "unexpected error: " << ex.what() << '\n';
    return 1;
  }
  return 2;
}
