#pragma once

#include <json.hpp>

#include "emosynth/emotion.hpp"

namespace emosynth {

// {"primary": "<label>", "secondary": ["<label>", ...]}
inline nlohmann::json emotion_state_to_json(const EmotionState& state) {
  nlohmann::json doc;
  doc["primary"] = std::string(label_of(state.primary()));
  doc["secondary"] = nlohmann::json::array();
  for (const auto& term : state.secondary()) {
    doc["secondary"].push_back(std::string(label_of(term)));
  }
  return doc;
}

// Throws Error / UnknownEmotion on schema or vocabulary violations.
inline EmotionState emotion_state_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("primary")) {
    throw Error("emotion state must be an object with a 'primary' label");
  }
  EmotionTerm primary = parse_emotion(doc.at("primary").get<std::string>());
  std::vector<EmotionTerm> secondary;
  if (doc.contains("secondary")) {
    for (const auto& label : doc.at("secondary")) {
      secondary.push_back(parse_emotion(label.get<std::string>()));
    }
  }
  return EmotionState(primary, std::move(secondary));
}

}  // namespace emosynth
