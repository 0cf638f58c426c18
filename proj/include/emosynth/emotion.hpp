#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "emosynth/errors.hpp"

namespace emosynth {

// The eight base groups of Plutchik's wheel.
enum class EmotionGroup : std::uint8_t {
  joy,
  trust,
  fear,
  surprise,
  sadness,
  disgust,
  anger,
  anticipation,
};

inline constexpr std::array<EmotionGroup, 8> kAllGroups = {
    EmotionGroup::joy,      EmotionGroup::trust,   EmotionGroup::fear,
    EmotionGroup::surprise, EmotionGroup::sadness, EmotionGroup::disgust,
    EmotionGroup::anger,    EmotionGroup::anticipation,
};

std::string_view group_name(EmotionGroup group);
EmotionGroup parse_group(std::string_view name);  // throws UnknownEmotion

// One of the 24 (group, intensity) terms. Intensity runs 1..3, mild to
// intense (e.g. Serenity = Joy@1, Grief = Sadness@3).
struct EmotionTerm {
  EmotionGroup group;
  int intensity;

  bool operator==(const EmotionTerm&) const = default;
};

// Canonical label for a term ("Serenity", "Grief", ...).
std::string_view label_of(EmotionTerm term);

// Case-insensitive lookup of a canonical label. Throws UnknownEmotion for
// anything outside the 24-term vocabulary.
EmotionTerm parse_emotion(std::string_view label);

// All 24 terms, group-major, intensity ascending.
const std::vector<EmotionTerm>& emotion_vocabulary();

// Replaces the active vocabulary with the contents of a label/group/intensity
// data file (tab- or whitespace-separated, one term per line, '#' comments).
// The file must define a bijection over exactly the 24 (group, intensity)
// pairs; labels may differ from the built-in ones.
void load_vocabulary(const std::string& path);

// Restores the built-in vocabulary (used by tests).
void reset_vocabulary();

// Sign per base group. Default: Joy/Trust/Anticipation positive,
// Fear/Sadness/Disgust/Anger negative, Surprise neutral. The paper assigns
// signed scores per emotion but no group polarity, so the table stays
// configurable.
class ValenceTable {
 public:
  ValenceTable();  // default signs

  int sign(EmotionGroup group) const;
  void set_sign(EmotionGroup group, int sign);  // sign in {-1, 0, +1}

  bool operator==(const ValenceTable&) const = default;

 private:
  std::array<int, 8> signs_;
};

const ValenceTable& default_valence();

// sign(group) * intensity.
int score(EmotionTerm term, const ValenceTable& table = default_valence());

// Primary plus up to two distinct secondary emotions.
class EmotionState {
 public:
  explicit EmotionState(EmotionTerm primary,
                        std::vector<EmotionTerm> secondary = {});

  EmotionTerm primary() const { return primary_; }
  const std::vector<EmotionTerm>& secondary() const { return secondary_; }

  bool operator==(const EmotionState&) const = default;

 private:
  EmotionTerm primary_;
  std::vector<EmotionTerm> secondary_;
};

enum class StateScorePolicy {
  primary_only,          // default: secondaries carry no weight
  mean_with_secondaries  // unweighted mean over primary + secondaries
};

// Scalar score of a state. Both policies coincide when there are no
// secondary emotions.
double state_score(const EmotionState& state,
                   const ValenceTable& table = default_valence(),
                   StateScorePolicy policy = StateScorePolicy::primary_only);

}  // namespace emosynth
