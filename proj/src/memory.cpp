#include "emosynth/memory.hpp"

#include <chrono>
#include <fstream>

#include "emosynth/emotion_json.hpp"

namespace emosynth {

using nlohmann::json;

namespace {

std::int64_t system_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string render_state(const EmotionState& state) {
  std::string out(label_of(state.primary()));
  for (const auto& term : state.secondary()) {
    out += " + ";
    out += label_of(term);
  }
  return out;
}

}  // namespace

EmotionMemory::EmotionMemory(std::string session_id, Clock clock)
    : session_id_(std::move(session_id)), clock_(std::move(clock)) {}

void EmotionMemory::append(int turn_index, EmotionAnalysis analysis) {
  if (!entries_.empty() && turn_index <= entries_.back().turn_index) {
    throw OutOfOrderTurn("turn index " + std::to_string(turn_index) +
                         " does not advance past " +
                         std::to_string(entries_.back().turn_index));
  }
  entries_.push_back(
      {turn_index, std::move(analysis), clock_ ? clock_() : system_now()});
}

int EmotionMemory::next_turn_index() const {
  return entries_.empty() ? 0 : entries_.back().turn_index + 1;
}

std::string EmotionMemory::render(std::size_t window) const {
  if (entries_.empty()) {
    return std::string(kNoMemoryMarker);
  }
  const std::size_t start =
      entries_.size() > window ? entries_.size() - window : 0;
  std::string out;
  for (std::size_t i = start; i < entries_.size(); ++i) {
    const MemoryEntry& entry = entries_[i];
    out += "[turn " + std::to_string(entry.turn_index) +
           "] emotion: " + render_state(entry.analysis.state) +
           " | shifts: " + entry.analysis.recent_shifts +
           " | trend: " + entry.analysis.overall_trend +
           " | causes: " + entry.analysis.causes + "\n";
  }
  out.pop_back();
  return out;
}

void EmotionMemory::save_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write memory file: " + path);
  }
  for (const auto& entry : entries_) {
    json line;
    line["turn_index"] = entry.turn_index;
    line["analysis"] = emotion_analysis_to_json(entry.analysis);
    line["timestamp"] = entry.timestamp;
    out << line.dump() << '\n';
  }
}

EmotionMemory EmotionMemory::load_jsonl(const std::string& path,
                                        std::string session_id) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open memory file: " + path);
  }
  EmotionMemory memory(std::move(session_id));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& ex) {
      throw ParseError(path + ": invalid memory line: " + ex.what(), line);
    }
    const std::int64_t timestamp = doc.value("timestamp", 0);
    memory.append(doc.at("turn_index").get<int>(),
                  emotion_analysis_from_json(doc.at("analysis")));
    memory.entries_.back().timestamp = timestamp;
  }
  return memory;
}

}  // namespace emosynth
