#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "emosynth/synthesis.hpp"
#include "support.hpp"

using namespace emosynth;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args, const std::string& out_file,
            const std::string& err_file) {
  const std::string command = std::string(EMOSYNTH_CLI_PATH) + " " + args + " >" +
                              out_file + " 2>" + err_file;
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

json scripted_config(const std::string& script_path, int max_turns = 4) {
  return json{{"backends",
               {{"default",
                 {{"type", "scripted"}, {"script", script_path}}}}},
              {"synthesis", {{"max_turns", max_turns}, {"parallelism", 1}}}};
}

// One full EM+RC session: two seeker turns, the second ends positively with
// both goals done, so screening accepts it.
json session_script() {
  json responses = json::array();
  responses.push_back({{"content", emotest::fenced(emotest::seeker_doc(
                                       "Sadness", {}, {}, "I feel stuck lately"))}});
  responses.push_back({{"content", emotest::fenced(emotest::tracking_doc("Sadness"))}});
  responses.push_back(
      {{"content", emotest::fenced(emotest::counselor_doc(
                       "exploration", "Tell me more about stuck"))}});
  responses.push_back({{"content", emotest::fenced(emotest::reactions_doc())}});
  responses.push_back({{"content", emotest::fenced(emotest::safety_doc(true))}});
  responses.push_back(
      {{"content", emotest::fenced(emotest::seeker_doc(
                       "Serenity", {}, {"emotion", "advice"}, "Thank you END"))}});
  return json{{"responses", responses}};
}

void write_cards(const std::string& path, int count) {
  std::vector<RoleCard> cards;
  const std::vector<std::string> topics = {"Career", "Family", "Growth",
                                           "Marriage", "Emotion"};
  for (int i = 0; i < count; ++i) {
    cards.push_back(
        emotest::make_card("card" + std::to_string(i), topics[i % topics.size()]));
  }
  save_cards_jsonl(cards, path);
}

}  // namespace

TEST_CASE("synthesize writes screened sessions, memory, and stats") {
  emotest::TempDir dir("cli_synth");
  write_cards(dir.str("cards.jsonl"), 3);
  emotest::write_file(dir.str("script.json"), session_script().dump());
  emotest::write_file(dir.str("config.json"),
                      scripted_config(dir.str("script.json")).dump());

  const int status = run_cli("--config " + dir.str("config.json") +
                                 " synthesize --cards " + dir.str("cards.jsonl") +
                                 " --out " + dir.str("out"),
                             dir.str("stdout.txt"), dir.str("stderr.txt"));
  CHECK(status == 0);
  CHECK(emotest::read_file(dir.str("stdout.txt")).find("accepted 3") !=
        std::string::npos);

  const auto sessions = load_sessions_dir(dir.str("out/sessions"));
  REQUIRE(sessions.size() == 3);
  for (const auto& session : sessions) {
    CHECK(session.terminated_by == Termination::end_token);
    CHECK(session.goal_ledger.at("emotion"));
  }
  CHECK(fs::exists(dir.str("out/stats.json")));
  CHECK(fs::exists(dir.str("out/sessions/card0.memory.jsonl")));

  const json stats = json::parse(emotest::read_file(dir.str("out/stats.json")));
  CHECK(stats.at("n_dialogues") == 3);
  CHECK(stats.at("avg_turns").get<double>() == doctest::Approx(2.0));
  CHECK(stats.at("avg_len").get<double>() == doctest::Approx(52.0 / 3.0));
}

TEST_CASE("synthesize fails cleanly on a missing cards file") {
  emotest::TempDir dir("cli_missing");
  emotest::write_file(dir.str("script.json"), session_script().dump());
  emotest::write_file(dir.str("config.json"),
                      scripted_config(dir.str("script.json")).dump());
  const int status = run_cli("--config " + dir.str("config.json") +
                                 " synthesize --cards " + dir.str("nope.jsonl") +
                                 " --out " + dir.str("out"),
                             dir.str("stdout.txt"), dir.str("stderr.txt"));
  CHECK(status != 0);
  CHECK(emotest::read_file(dir.str("stderr.txt")).find("nope.jsonl") !=
        std::string::npos);
}

TEST_CASE("the --no-rc flag removes every safety event") {
  emotest::TempDir dir("cli_norc");
  write_cards(dir.str("cards.jsonl"), 2);
  json script = json{{"responses", json::array()}};
  script["responses"].push_back(
      {{"content", emotest::fenced(emotest::seeker_doc("Sadness", {}, {}, "hi"))}});
  script["responses"].push_back(
      {{"content", emotest::fenced(emotest::tracking_doc("Sadness"))}});
  script["responses"].push_back(
      {{"content", emotest::fenced(emotest::counselor_doc())}});
  script["responses"].push_back(
      {{"content", emotest::fenced(emotest::seeker_doc(
                       "Joy", {}, {"emotion"}, "bye END"))}});
  emotest::write_file(dir.str("script.json"), script.dump());
  emotest::write_file(dir.str("config.json"),
                      scripted_config(dir.str("script.json")).dump());

  const int status = run_cli("--config " + dir.str("config.json") +
                                 " synthesize --no-rc --cards " +
                                 dir.str("cards.jsonl") + " --out " + dir.str("out"),
                             dir.str("stdout.txt"), dir.str("stderr.txt"));
  REQUIRE(status == 0);
  for (const auto& session : load_sessions_dir(dir.str("out/sessions"))) {
    for (const auto& turn : session.turns) {
      if (!turn.trace) continue;
      CHECK(turn.trace->verdicts.empty());
      for (const auto& event : turn.trace->tool_events) {
        CHECK(event.call.at("name") != "safety_analysis");
      }
    }
  }
}

TEST_CASE("export emits agent and llm training files") {
  emotest::TempDir dir("cli_export");
  write_cards(dir.str("cards.jsonl"), 2);
  emotest::write_file(dir.str("script.json"), session_script().dump());
  emotest::write_file(dir.str("config.json"),
                      scripted_config(dir.str("script.json")).dump());
  REQUIRE(run_cli("--config " + dir.str("config.json") + " synthesize --cards " +
                      dir.str("cards.jsonl") + " --out " + dir.str("out"),
                  dir.str("o.txt"), dir.str("e.txt")) == 0);

  // Agent format: four datasets.
  CHECK(run_cli("--config " + dir.str("config.json") + " export --sessions " +
                    dir.str("out/sessions") + " --format agent --out " +
                    dir.str("train"),
                dir.str("o.txt"), dir.str("e.txt")) == 0);
  for (const std::string name : {"agent_tracking", "agent_counselor",
                                 "agent_safety", "agent_seeker"}) {
    CHECK(fs::exists(dir.str("train/" + name + ".jsonl")));
  }
  CHECK(read_jsonl(dir.str("train/agent_tracking.jsonl")).size() == 2);
  CHECK(read_jsonl(dir.str("train/agent_counselor.jsonl")).size() == 2);

  // LLM format with a scripted compiler: one row per counselor turn.
  json compile_script = json{{"responses", json::array()}};
  for (int i = 0; i < 2; ++i) {
    compile_script["responses"].push_back(
        {{"content", emotest::cot_reasoning_text()}});
  }
  emotest::write_file(dir.str("compile_script.json"), compile_script.dump());
  emotest::write_file(dir.str("config_llm.json"),
                      scripted_config(dir.str("compile_script.json")).dump());
  CHECK(run_cli("--config " + dir.str("config_llm.json") + " export --sessions " +
                    dir.str("out/sessions") + " --format llm --out " +
                    dir.str("train"),
                dir.str("o.txt"), dir.str("e.txt")) == 0);
  CHECK(read_jsonl(dir.str("train/llm_mode.jsonl")).size() == 2);

  // Empty input directory is an error.
  fs::create_directories(dir.str("empty"));
  CHECK(run_cli("--config " + dir.str("config.json") + " export --sessions " +
                    dir.str("empty") + " --format agent --out " + dir.str("train"),
                dir.str("o.txt"), dir.str("e.txt")) != 0);
}

TEST_CASE("eval produces deterministic reports under a fixed seed") {
  emotest::TempDir dir("cli_eval");
  write_cards(dir.str("cards.jsonl"), 4);

  json eval_reply = emotest::seeker_doc("Joy", {}, {"emotion"}, "all better END");
  eval_reply["risk"] = 0;
  json script = json{{"responses", json::array({{{"content",
                                                  emotest::fenced(eval_reply)}}})}};
  emotest::write_file(dir.str("script.json"), script.dump());
  json config = scripted_config(dir.str("script.json"));
  config["eval"] = {{"n_cards", 2}, {"seed", 11}, {"max_turns", 3}};
  emotest::write_file(dir.str("config.json"), config.dump());

  auto run_once = [&](const std::string& out) {
    return run_cli("--config " + dir.str("config.json") + " eval --cards " +
                       dir.str("cards.jsonl") + " --out " + dir.str(out),
                   dir.str(out + ".stdout"), dir.str(out + ".stderr"));
  };
  REQUIRE(run_once("r1") == 0);
  REQUIRE(run_once("r2") == 0);
  const std::string first = emotest::read_file(dir.str("r1/report.json"));
  CHECK(first == emotest::read_file(dir.str("r2/report.json")));
  CHECK(json::parse(first).at("sessions").size() == 2);
  CHECK(emotest::read_file(dir.str("r1.stdout")).find("EIS") != std::string::npos);
}

TEST_CASE("eval reports backend failures with a nonzero exit") {
  emotest::TempDir dir("cli_eval_down");
  write_cards(dir.str("cards.jsonl"), 2);
  const json config = {
      {"backends",
       {{"default",
         {{"type", "http"},
          {"base_url", "http://127.0.0.1:9"},
          {"max_retries", 0},
          {"timeout_s", 2}}}}},
      {"eval", {{"n_cards", 2}, {"seed", 1}, {"max_turns", 2}}}};
  emotest::write_file(dir.str("config.json"), config.dump());
  const int status = run_cli("--config " + dir.str("config.json") +
                                 " eval --cards " + dir.str("cards.jsonl") +
                                 " --out " + dir.str("out"),
                             dir.str("stdout.txt"), dir.str("stderr.txt"));
  CHECK(status != 0);
  CHECK(emotest::read_file(dir.str("stdout.txt")).find("failed sessions: 2") !=
        std::string::npos);
}

TEST_CASE("stats prints the corpus summary") {
  emotest::TempDir dir("cli_stats");
  write_cards(dir.str("cards.jsonl"), 2);
  emotest::write_file(dir.str("script.json"), session_script().dump());
  emotest::write_file(dir.str("config.json"),
                      scripted_config(dir.str("script.json")).dump());
  REQUIRE(run_cli("--config " + dir.str("config.json") + " synthesize --cards " +
                      dir.str("cards.jsonl") + " --out " + dir.str("out"),
                  dir.str("o.txt"), dir.str("e.txt")) == 0);

  const int status = run_cli("stats --sessions " + dir.str("out/sessions"),
                             dir.str("stdout.txt"), dir.str("stderr.txt"));
  CHECK(status == 0);
  const std::string out = emotest::read_file(dir.str("stdout.txt"));
  CHECK(out.find("n_dialogues: 2") != std::string::npos);
  CHECK(out.find("avg_turns: 2") != std::string::npos);
  CHECK(out.find("17.3333") != std::string::npos);  // 52 chars / 3 utterances
  CHECK(out.find("Career: 1") != std::string::npos);

  const int empty_status = run_cli("stats --sessions " + dir.str("out/quarantine"),
                                   dir.str("stdout.txt"), dir.str("stderr.txt"));
  CHECK(empty_status != 0);
}

TEST_CASE("derive-cards turns seed dialogues into a card file") {
  emotest::TempDir dir("cli_derive");
  json seeds = json::array();
  json seed_doc = {{"turns", json::array({{{"speaker", "seeker"},
                                           {"text", "I dread every morning"}},
                                          {{"speaker", "counselor"},
                                           {"text", "Since when?"}}})}};
  std::string seeds_text = seed_doc.dump() + "\n" + seed_doc.dump() + "\n";
  emotest::write_file(dir.str("seeds.jsonl"), seeds_text);

  json script = json{{"responses", json::array()}};
  script["responses"].push_back(
      {{"content",
        emotest::fenced(card_to_json(emotest::make_card("derived0", "Growth")))}});
  script["responses"].push_back(
      {{"content",
        emotest::fenced(card_to_json(emotest::make_card("derived1", "Career")))}});
  emotest::write_file(dir.str("script.json"), script.dump());
  json config = scripted_config(dir.str("script.json"));
  config["backends"]["default"]["replay_per_session"] = false;
  emotest::write_file(dir.str("config.json"), config.dump());

  const int status = run_cli("--config " + dir.str("config.json") +
                                 " derive-cards --seeds " + dir.str("seeds.jsonl") +
                                 " --out " + dir.str("cards.jsonl"),
                             dir.str("stdout.txt"), dir.str("stderr.txt"));
  CHECK(status == 0);
  const auto cards = load_cards_jsonl(dir.str("cards.jsonl"));
  REQUIRE(cards.size() == 2);
  CHECK(cards[0].id == "derived0");
  CHECK(cards[1].id == "derived1");
}
