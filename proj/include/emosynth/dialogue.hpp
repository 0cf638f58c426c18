#pragma once

#include <string>
#include <vector>

namespace emosynth {

enum class Speaker { seeker, counselor };

std::string_view speaker_name(Speaker speaker);
Speaker parse_speaker(std::string_view name);

struct Utterance {
  Speaker speaker;
  std::string text;

  bool operator==(const Utterance&) const = default;
};

using Transcript = std::vector<Utterance>;

// "Seeker: ...\nCounselor: ..." rendering used inside prompts.
// Empty transcripts render as an explicit start-of-conversation marker.
std::string render_history(const Transcript& history);

// Number of Unicode code points in a UTF-8 string. Utterance lengths are
// counted in characters, not bytes, to match the corpus convention.
std::size_t utf8_length(std::string_view text);

}  // namespace emosynth
