#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "emosynth/agent_types.hpp"

namespace emosynth {

// Marker rendered into tracking prompts when no analyses exist yet.
inline constexpr std::string_view kNoMemoryMarker = "no prior emotion records";

struct MemoryEntry {
  int turn_index = 0;
  EmotionAnalysis analysis;
  std::int64_t timestamp = 0;  // unix seconds

  bool operator==(const MemoryEntry&) const = default;
};

// Append-only per-session log of emotion tracking outputs. Turn indices must
// strictly increase (gaps allowed); entries are never mutated or removed.
class EmotionMemory {
 public:
  using Clock = std::function<std::int64_t()>;

  explicit EmotionMemory(std::string session_id = {}, Clock clock = {});

  const std::string& session_id() const { return session_id_; }
  const std::vector<MemoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Throws OutOfOrderTurn unless turn_index advances past the last entry.
  void append(int turn_index, EmotionAnalysis analysis);

  // Smallest turn index append() would currently accept.
  int next_turn_index() const;

  // Deterministic text over the last `window` entries, oldest first; the
  // empty-memory marker when nothing is stored.
  std::string render(std::size_t window = 5) const;

  void save_jsonl(const std::string& path) const;
  static EmotionMemory load_jsonl(const std::string& path,
                                  std::string session_id = {});

 private:
  std::string session_id_;
  Clock clock_;
  std::vector<MemoryEntry> entries_;
};

}  // namespace emosynth
