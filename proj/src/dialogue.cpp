#include "emosynth/dialogue.hpp"

#include "emosynth/errors.hpp"

namespace emosynth {

std::string_view speaker_name(Speaker speaker) {
  return speaker == Speaker::seeker ? "seeker" : "counselor";
}

Speaker parse_speaker(std::string_view name) {
  if (name == "seeker") return Speaker::seeker;
  if (name == "counselor") return Speaker::counselor;
  throw Error("invalid speaker: '" + std::string(name) + "'");
}

std::string render_history(const Transcript& history) {
  if (history.empty()) {
    return "(the conversation has not started yet)";
  }
  std::string out;
  for (const auto& utterance : history) {
    out += utterance.speaker == Speaker::seeker ? "Seeker: " : "Counselor: ";
    out += utterance.text;
    out += '\n';
  }
  out.pop_back();
  return out;
}

std::size_t utf8_length(std::string_view text) {
  std::size_t count = 0;
  for (unsigned char byte : text) {
    if ((byte & 0xC0) != 0x80) {  // skip continuation bytes
      ++count;
    }
  }
  return count;
}

}  // namespace emosynth
