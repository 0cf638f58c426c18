#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emosynth/emotion.hpp"

namespace emosynth {

enum class GoalKind { emotion, advice };

std::string_view goal_kind_name(GoalKind kind);
GoalKind parse_goal_kind(std::string_view name);

struct Goal {
  GoalKind kind;
  std::string description;
  bool completed = false;

  bool operator==(const Goal&) const = default;
};

struct EmotionTrigger {
  std::string event;
  EmotionState resulting_emotion;

  bool operator==(const EmotionTrigger&) const = default;
};

struct BigFive {
  double openness = 0.5;
  double conscientiousness = 0.5;
  double extraversion = 0.5;
  double agreeableness = 0.5;
  double neuroticism = 0.5;

  bool operator==(const BigFive&) const = default;
};

// A seeker persona. Valid cards carry exactly two goals (one emotion-related,
// one advice-related), a topic from the 12-label list, and a valid initial
// emotion.
struct RoleCard {
  std::string id;
  std::string gender;
  int age = 0;
  std::string occupation;
  BigFive big_five;
  std::string character;
  std::string language_style;
  std::vector<std::string> hobbies;
  std::string problems;
  std::string inner_monologue;
  std::string topic;
  std::vector<Goal> goals;
  EmotionState initial_emotion{EmotionTerm{EmotionGroup::sadness, 2}};
  std::vector<EmotionTrigger> triggers;

  bool operator==(const RoleCard&) const = default;
};

// The 12 counseling topics.
const std::vector<std::string>& topic_labels();
void load_topics(const std::string& path);  // one label per line
void reset_topics();

// Lists every violated invariant; empty means the card is valid.
std::vector<std::string> validate_card(const RoleCard& card);

nlohmann::json card_to_json(const RoleCard& card);
RoleCard card_from_json(const nlohmann::json& doc);  // throws ParseError

// JSONL persistence, one card per line.
std::vector<RoleCard> load_cards_jsonl(const std::string& path);
void save_cards_jsonl(const std::vector<RoleCard>& cards, const std::string& path);

enum class CellGranularity { group, term };

struct SampleOptions {
  CellGranularity granularity = CellGranularity::group;
};

// Deterministic stratified sample over (topic x initial-emotion) cells.
// Non-exhausted cells end up within one card of each other; cells smaller
// than their share contribute every member.
std::vector<RoleCard> stratified_sample(const std::vector<RoleCard>& cards,
                                        std::size_t n, std::uint64_t seed,
                                        const SampleOptions& options = {});

}  // namespace emosynth
