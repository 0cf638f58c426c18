#include "emosynth/emotion.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace emosynth {

namespace {

constexpr std::array<std::string_view, 8> kGroupNames = {
    "Joy",     "Trust",   "Fear",  "Surprise",
    "Sadness", "Disgust", "Anger", "Anticipation",
};

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

struct VocabEntry {
  std::string label;
  EmotionTerm term;
};

std::vector<VocabEntry> builtin_vocabulary() {
  // Plutchik's wheel: three intensities per group, mild to intense.
  static const std::array<std::array<std::string_view, 3>, 8> kLabels = {{
      {"Serenity", "Joy", "Ecstasy"},
      {"Acceptance", "Trust", "Admiration"},
      {"Apprehension", "Fear", "Terror"},
      {"Distraction", "Surprise", "Amazement"},
      {"Pensiveness", "Sadness", "Grief"},
      {"Boredom", "Disgust", "Loathing"},
      {"Annoyance", "Anger", "Rage"},
      {"Interest", "Anticipation", "Vigilance"},
  }};
  std::vector<VocabEntry> entries;
  entries.reserve(24);
  for (std::size_t g = 0; g < kAllGroups.size(); ++g) {
    for (int i = 1; i <= 3; ++i) {
      entries.push_back(
          {std::string(kLabels[g][static_cast<std::size_t>(i - 1)]),
           EmotionTerm{kAllGroups[g], i}});
    }
  }
  return entries;
}

struct Vocabulary {
  std::vector<VocabEntry> entries;         // group-major, intensity ascending
  std::map<std::string, EmotionTerm> by_lower_label;
  std::vector<EmotionTerm> terms;

  explicit Vocabulary(std::vector<VocabEntry> e) : entries(std::move(e)) {
    for (const auto& entry : entries) {
      by_lower_label.emplace(to_lower(entry.label), entry.term);
      terms.push_back(entry.term);
    }
  }
};

Vocabulary& active_vocabulary() {
  static Vocabulary vocab(builtin_vocabulary());
  return vocab;
}

void validate_entries(const std::vector<VocabEntry>& entries,
                      const std::string& origin) {
  if (entries.size() != 24) {
    throw ConfigError(origin + ": expected 24 emotion terms, got " +
                      std::to_string(entries.size()));
  }
  std::map<std::string, int> labels;
  std::map<std::pair<int, int>, int> pairs;
  for (const auto& e : entries) {
    if (e.term.intensity < 1 || e.term.intensity > 3) {
      throw ConfigError(origin + ": intensity out of range for label '" +
                        e.label + "'");
    }
    if (++labels[to_lower(e.label)] > 1) {
      throw ConfigError(origin + ": duplicate label '" + e.label + "'");
    }
    if (++pairs[{static_cast<int>(e.term.group), e.term.intensity}] > 1) {
      throw ConfigError(origin + ": duplicate (group, intensity) pair for '" +
                        e.label + "'");
    }
  }
}

}  // namespace

std::string_view group_name(EmotionGroup group) {
  return kGroupNames[static_cast<std::size_t>(group)];
}

EmotionGroup parse_group(std::string_view name) {
  const std::string lowered = to_lower(name);
  for (std::size_t g = 0; g < kGroupNames.size(); ++g) {
    if (lowered == to_lower(kGroupNames[g])) {
      return kAllGroups[g];
    }
  }
  throw UnknownEmotion(std::string(name));
}

std::string_view label_of(EmotionTerm term) {
  for (const auto& entry : active_vocabulary().entries) {
    if (entry.term == term) {
      return entry.label;
    }
  }
  throw UnknownEmotion(std::string(group_name(term.group)) + "@" +
                       std::to_string(term.intensity));
}

EmotionTerm parse_emotion(std::string_view label) {
  const auto& vocab = active_vocabulary();
  auto it = vocab.by_lower_label.find(to_lower(label));
  if (it == vocab.by_lower_label.end()) {
    throw UnknownEmotion(std::string(label));
  }
  return it->second;
}

const std::vector<EmotionTerm>& emotion_vocabulary() {
  return active_vocabulary().terms;
}

void load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open emotion vocabulary file: " + path);
  }
  std::vector<VocabEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::istringstream fields(line);
    std::string label, group;
    int intensity = 0;
    if (!(fields >> label >> group >> intensity)) {
      throw ConfigError(path + ": malformed vocabulary line: '" + line + "'");
    }
    entries.push_back({label, EmotionTerm{parse_group(group), intensity}});
  }
  validate_entries(entries, path);
  active_vocabulary() = Vocabulary(std::move(entries));
}

void reset_vocabulary() { active_vocabulary() = Vocabulary(builtin_vocabulary()); }

ValenceTable::ValenceTable() {
  signs_ = {+1, +1, -1, 0, -1, -1, -1, +1};
}

int ValenceTable::sign(EmotionGroup group) const {
  return signs_[static_cast<std::size_t>(group)];
}

void ValenceTable::set_sign(EmotionGroup group, int sign) {
  if (sign < -1 || sign > 1) {
    throw ConfigError("valence sign must be -1, 0, or +1");
  }
  signs_[static_cast<std::size_t>(group)] = sign;
}

const ValenceTable& default_valence() {
  static const ValenceTable table;
  return table;
}

int score(EmotionTerm term, const ValenceTable& table) {
  return table.sign(term.group) * term.intensity;
}

EmotionState::EmotionState(EmotionTerm primary,
                           std::vector<EmotionTerm> secondary)
    : primary_(primary), secondary_(std::move(secondary)) {
  if (secondary_.size() > 2) {
    throw Error("emotion state allows at most two secondary emotions, got " +
                std::to_string(secondary_.size()));
  }
  for (std::size_t i = 0; i < secondary_.size(); ++i) {
    if (secondary_[i] == primary_) {
      throw Error("secondary emotion duplicates the primary emotion");
    }
    for (std::size_t j = i + 1; j < secondary_.size(); ++j) {
      if (secondary_[i] == secondary_[j]) {
        throw Error("duplicate secondary emotion");
      }
    }
  }
}

double state_score(const EmotionState& state, const ValenceTable& table,
                   StateScorePolicy policy) {
  const double primary = score(state.primary(), table);
  if (policy == StateScorePolicy::primary_only || state.secondary().empty()) {
    return primary;
  }
  double sum = primary;
  for (const auto& term : state.secondary()) {
    sum += score(term, table);
  }
  return sum / static_cast<double>(1 + state.secondary().size());
}

}  // namespace emosynth
