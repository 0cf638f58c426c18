#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "emosynth/backend.hpp"
#include "emosynth/role_card.hpp"

namespace emotest {

using nlohmann::json;

// Wraps a JSON document the way agent replies arrive.
inline std::string fenced(const json& doc) {
  return "Here is my reply.\n```json\n" + doc.dump(2) + "\n```\n";
}

inline json seeker_doc(const std::string& primary,
                       const std::vector<std::string>& secondary,
                       const std::vector<std::string>& completed_goals,
                       const std::string& response) {
  return json{{"current_emotion", {{"primary", primary}, {"secondary", secondary}}},
              {"triggering_events", json::array()},
              {"completed_goals", completed_goals},
              {"response", response}};
}

inline json tracking_doc(const std::string& primary,
                         const std::vector<std::string>& secondary = {},
                         const std::string& shifts = "steady so far",
                         const std::string& trend = "flat",
                         const std::string& causes = "work pressure") {
  return json{{"current_emotion", {{"primary", primary}, {"secondary", secondary}}},
              {"recent_shifts", shifts},
              {"overall_trend", trend},
              {"causes", causes}};
}

inline json counselor_doc(const std::string& stage = "exploration",
                          const std::string& draft = "Could you say more about that?") {
  return json{{"stage", stage},
              {"strategies", json::array({"reflect feelings"})},
              {"draft", draft}};
}

inline json reactions_doc() {
  return json{{"reactions",
               json::array({json{{"behavior", "normal"}, {"reaction", "okay"}},
                            json{{"behavior", "silence"}, {"reaction", "..."}},
                            json{{"behavior", "excessive_sentimentality"},
                                 {"reaction", "it is all too much"}},
                            json{{"behavior", "explosive_anger"},
                                 {"reaction", "you do not get it"}}})}};
}

inline json safety_doc(bool safe, const std::string& suggestions = "") {
  json doc{{"safe", safe}, {"risky_reactions", json::array()}};
  doc["suggestions"] = suggestions;
  if (!safe && !suggestions.empty()) {
    doc["risky_reactions"] = json::array({3});
  }
  return doc;
}

inline std::string cot_text(const std::string& response) {
  return "[Emotion Shift Tracking]\nI see sadness easing into calm.\n"
         "[Current Counseling Plan]\nI stay in exploration and reflect.\n"
         "[Safety Risk Analysis]\nI expect no escalation from a gentle reply.\n"
         "[Integration]\nI will name the feeling and invite more.\n"
         "[Response]\n" +
         response;
}

inline std::string cot_reasoning_text() {
  return "[Emotion Shift Tracking]\nI see sadness easing into calm.\n"
         "[Current Counseling Plan]\nI stay in exploration and reflect.\n"
         "[Safety Risk Analysis]\nI expect no escalation from a gentle reply.\n"
         "[Integration]\nI will name the feeling and invite more.";
}

inline emosynth::RoleCard make_card(const std::string& id,
                                    const std::string& topic = "Career",
                                    const std::string& initial = "Sadness") {
  emosynth::RoleCard card;
  card.id = id;
  card.gender = "female";
  card.age = 29;
  card.occupation = "teacher";
  card.character = "quietly determined";
  card.language_style = "soft, hesitant sentences";
  card.hobbies = {"hiking", "sketching"};
  card.problems = "feels stuck after a demotion";
  card.inner_monologue = "maybe I am simply not good enough";
  card.topic = topic;
  card.goals = {{emosynth::GoalKind::emotion, "feel less hopeless", false},
                {emosynth::GoalKind::advice, "find one concrete next step", false}};
  card.initial_emotion =
      emosynth::EmotionState(emosynth::parse_emotion(initial));
  card.triggers = {{"being compared to colleagues",
                    emosynth::EmotionState(emosynth::parse_emotion("Anger"))}};
  return card;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("emosynth_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& child = {}) const {
    return child.empty() ? path_.string() : (path_ / child).string();
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace emotest
