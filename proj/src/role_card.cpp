#include "emosynth/role_card.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "emosynth/emotion_json.hpp"

namespace emosynth {

using nlohmann::json;

std::string_view goal_kind_name(GoalKind kind) {
  return kind == GoalKind::emotion ? "emotion" : "advice";
}

GoalKind parse_goal_kind(std::string_view name) {
  if (name == "emotion") return GoalKind::emotion;
  if (name == "advice") return GoalKind::advice;
  throw Error("invalid goal kind: '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> builtin_topics() {
  return {"Marriage", "Treatment",      "Emotion", "Interpersonal",
          "Growth",   "Behavior",       "Family",  "Self-Awareness",
          "Career",   "Social Events",  "Sex",     "Psychological Knowledge"};
}

std::vector<std::string>& active_topics() {
  static std::vector<std::string> topics = builtin_topics();
  return topics;
}

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

const std::vector<std::string>& topic_labels() { return active_topics(); }

void load_topics(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open topic list: " + path);
  }
  std::vector<std::string> topics;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty() && line[0] != '#') {
      topics.push_back(line);
    }
  }
  if (topics.empty()) {
    throw ConfigError("topic list is empty: " + path);
  }
  active_topics() = std::move(topics);
}

void reset_topics() { active_topics() = builtin_topics(); }

std::vector<std::string> validate_card(const RoleCard& card) {
  std::vector<std::string> report;
  if (card.id.empty()) {
    report.push_back("missing id");
  }
  if (card.age < 0) {
    report.push_back("age must be non-negative");
  }
  if (card.goals.size() != 2) {
    report.push_back("goal count must be exactly 2 (one emotion, one advice), got " +
                     std::to_string(card.goals.size()));
  } else {
    const bool has_emotion = card.goals[0].kind == GoalKind::emotion ||
                             card.goals[1].kind == GoalKind::emotion;
    const bool has_advice = card.goals[0].kind == GoalKind::advice ||
                            card.goals[1].kind == GoalKind::advice;
    if (!has_emotion || !has_advice) {
      report.push_back("goal count per kind must be one emotion and one advice goal");
    }
  }
  for (const auto& goal : card.goals) {
    if (goal.description.empty()) {
      report.push_back(std::string("empty description for ") +
                       std::string(goal_kind_name(goal.kind)) + " goal");
    }
  }
  const auto& topics = topic_labels();
  if (std::find(topics.begin(), topics.end(), card.topic) == topics.end()) {
    report.push_back("unknown topic: '" + card.topic + "'");
  }
  const BigFive& b = card.big_five;
  if (!in_unit_interval(b.openness) || !in_unit_interval(b.conscientiousness) ||
      !in_unit_interval(b.extraversion) || !in_unit_interval(b.agreeableness) ||
      !in_unit_interval(b.neuroticism)) {
    report.push_back("big five scores must lie in [0, 1]");
  }
  for (const auto& trigger : card.triggers) {
    if (trigger.event.empty()) {
      report.push_back("empty trigger event");
    }
  }
  return report;
}

json card_to_json(const RoleCard& card) {
  json doc;
  doc["id"] = card.id;
  doc["gender"] = card.gender;
  doc["age"] = card.age;
  doc["occupation"] = card.occupation;
  doc["big_five"] = {{"openness", card.big_five.openness},
                     {"conscientiousness", card.big_five.conscientiousness},
                     {"extraversion", card.big_five.extraversion},
                     {"agreeableness", card.big_five.agreeableness},
                     {"neuroticism", card.big_five.neuroticism}};
  doc["character"] = card.character;
  doc["language_style"] = card.language_style;
  doc["hobbies"] = card.hobbies;
  doc["problems"] = card.problems;
  doc["inner_monologue"] = card.inner_monologue;
  doc["topic"] = card.topic;
  doc["goals"] = json::array();
  for (const auto& goal : card.goals) {
    doc["goals"].push_back({{"kind", goal_kind_name(goal.kind)},
                            {"description", goal.description},
                            {"completed", goal.completed}});
  }
  doc["initial_emotion"] = emotion_state_to_json(card.initial_emotion);
  doc["triggers"] = json::array();
  for (const auto& trigger : card.triggers) {
    doc["triggers"].push_back(
        {{"event", trigger.event},
         {"emotion", emotion_state_to_json(trigger.resulting_emotion)}});
  }
  return doc;
}

RoleCard card_from_json(const json& doc) {
  try {
    RoleCard card;
    card.id = doc.at("id").get<std::string>();
    card.gender = doc.value("gender", "");
    card.age = doc.value("age", 0);
    card.occupation = doc.value("occupation", "");
    if (doc.contains("big_five")) {
      const auto& b = doc.at("big_five");
      card.big_five.openness = b.value("openness", 0.5);
      card.big_five.conscientiousness = b.value("conscientiousness", 0.5);
      card.big_five.extraversion = b.value("extraversion", 0.5);
      card.big_five.agreeableness = b.value("agreeableness", 0.5);
      card.big_five.neuroticism = b.value("neuroticism", 0.5);
    }
    card.character = doc.value("character", "");
    card.language_style = doc.value("language_style", "");
    if (doc.contains("hobbies")) {
      card.hobbies = doc.at("hobbies").get<std::vector<std::string>>();
    }
    card.problems = doc.value("problems", "");
    card.inner_monologue = doc.value("inner_monologue", "");
    card.topic = doc.at("topic").get<std::string>();
    for (const auto& goal : doc.at("goals")) {
      card.goals.push_back({parse_goal_kind(goal.at("kind").get<std::string>()),
                            goal.at("description").get<std::string>(),
                            goal.value("completed", false)});
    }
    card.initial_emotion = emotion_state_from_json(doc.at("initial_emotion"));
    if (doc.contains("triggers")) {
      for (const auto& trigger : doc.at("triggers")) {
        card.triggers.push_back(
            {trigger.at("event").get<std::string>(),
             emotion_state_from_json(trigger.at("emotion"))});
      }
    }
    return card;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed role card: ") + ex.what(), doc.dump());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& ex) {
    throw ParseError(std::string("malformed role card: ") + ex.what(), doc.dump());
  }
}

std::vector<RoleCard> load_cards_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open cards file: " + path);
  }
  std::vector<RoleCard> cards;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      cards.push_back(card_from_json(json::parse(line)));
    } catch (const json::exception& ex) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                           ": invalid JSON: " + ex.what(),
                       line);
    }
  }
  return cards;
}

void save_cards_jsonl(const std::vector<RoleCard>& cards, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write cards file: " + path);
  }
  for (const auto& card : cards) {
    out << card_to_json(card).dump() << '\n';
  }
}

std::vector<RoleCard> stratified_sample(const std::vector<RoleCard>& cards,
                                        std::size_t n, std::uint64_t seed,
                                        const SampleOptions& options) {
  if (n > cards.size()) {
    throw InsufficientCards("requested " + std::to_string(n) + " cards from a pool of " +
                            std::to_string(cards.size()));
  }
  // Cell key: topic x initial-emotion group (or exact term).
  std::map<std::string, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    const EmotionTerm primary = cards[i].initial_emotion.primary();
    std::string key = cards[i].topic + '/';
    key += group_name(primary.group);
    if (options.granularity == CellGranularity::term) {
      key += '@' + std::to_string(primary.intensity);
    }
    cells[key].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> ordered;
  ordered.reserve(cells.size());
  for (auto& [key, members] : cells) {
    std::shuffle(members.begin(), members.end(), rng);
    ordered.push_back(std::move(members));
  }

  // Round-robin across cells in key order, one card per pass, so counts stay
  // within one of each other until a cell runs out.
  std::vector<std::size_t> taken(ordered.size(), 0);
  std::vector<std::size_t> picked;
  picked.reserve(n);
  while (picked.size() < n) {
    for (std::size_t c = 0; c < ordered.size() && picked.size() < n; ++c) {
      if (taken[c] < ordered[c].size()) {
        picked.push_back(ordered[c][taken[c]++]);
      }
    }
  }

  std::vector<RoleCard> out;
  out.reserve(n);
  for (std::size_t index : picked) {
    out.push_back(cards[index]);
  }
  return out;
}

}  // namespace emosynth
