#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "emosynth/agent_types.hpp"
#include "emosynth/backend.hpp"
#include "emosynth/dialogue.hpp"
#include "emosynth/memory.hpp"
#include "emosynth/role_card.hpp"

namespace emosynth {

// Text template with {{placeholder}} slots. Rendering binds every
// placeholder found in the body and fails loudly on unbound ones.
class PromptTemplate {
 public:
  PromptTemplate() = default;
  PromptTemplate(std::string name, std::string body);

  const std::string& name() const { return name_; }
  const std::string& body() const { return body_; }
  const std::set<std::string>& required_placeholders() const {
    return placeholders_;
  }

  std::string render(const std::map<std::string, std::string>& bindings) const;

 private:
  std::string name_;
  std::string body_;
  std::set<std::string> placeholders_;
};

// The prompt for every agent role plus the counseling guideline text.
// Defaults are compiled in from the repo's templates/ and data/ files; a
// template directory can override any of them.
struct TemplateSet {
  PromptTemplate seeker;
  PromptTemplate eval_seeker;
  PromptTemplate emotion_tracking;
  PromptTemplate counselor;
  PromptTemplate reaction_prediction;
  PromptTemplate safety_analysis;
  PromptTemplate llm_mode;
  PromptTemplate cot_compile;
  PromptTemplate role_card;
  std::string eft_guideline;

  static TemplateSet builtin();
  // Loads <name>.tmpl / eft_guideline.txt from dir, falling back to the
  // builtin text for files that are absent.
  static TemplateSet load(const std::string& dir);
};

const TemplateSet& default_templates();

struct AgentOptions {
  const TemplateSet* templates = nullptr;  // null means default_templates()
  std::string model = "default";
  double temperature = 0.0;
  std::optional<int> max_tokens;
  std::size_t memory_window = 5;
  std::vector<Behavior> behaviors{kAllBehaviors.begin(), kAllBehaviors.end()};
  // When set, the safety prompt includes the conversation (the default
  // pipeline behavior); templates without the block simply ignore it.
  std::optional<Transcript> safety_history;
};

// Prompt building blocks, exposed for tests and exporters.
std::string render_card_block(const RoleCard& card);
std::string render_goals_block(const RoleCard& card);
std::string render_vocabulary_block();
std::string render_analysis_block(const EmotionAnalysis& analysis);
std::string render_reactions_block(const std::vector<PredictedReaction>& reactions);

// Exact prompts each agent sends (single user message).
std::string build_seeker_prompt(const RoleCard& card, const Transcript& history,
                                const AgentOptions& options = {});
std::string build_eval_seeker_prompt(const RoleCard& card, const Transcript& history,
                                     const AgentOptions& options = {});
std::string build_tracking_prompt(const Transcript& history, const EmotionMemory& memory,
                                  const AgentOptions& options = {});
std::string build_counselor_prompt(const Transcript& history,
                                   const std::optional<EmotionAnalysis>& analysis,
                                   const std::optional<std::string>& suggestions,
                                   const AgentOptions& options = {});
std::string build_reaction_prompt(const Transcript& history, const std::string& draft,
                                  const AgentOptions& options = {});
std::string build_safety_prompt(const std::string& draft,
                                const std::vector<PredictedReaction>& reactions,
                                const AgentOptions& options = {});

// One backend call each; structured replies are parsed per agent_types.
SeekerOutput run_seeker(const RoleCard& card, const Transcript& history,
                        ChatBackend& backend, const AgentOptions& options = {});

struct EvalSeekerTurn {
  SeekerOutput output;
  double risk = 0.0;  // in [0, 1]
};

EvalSeekerTurn run_eval_seeker(const RoleCard& card, const Transcript& history,
                               ChatBackend& backend, const AgentOptions& options = {});

EmotionAnalysis run_emotion_tracking(const Transcript& history,
                                     const EmotionMemory& memory, ChatBackend& backend,
                                     const AgentOptions& options = {});

CounselorDraft run_counselor(const Transcript& history,
                             const std::optional<EmotionAnalysis>& analysis,
                             const std::optional<std::string>& suggestions,
                             ChatBackend& backend, const AgentOptions& options = {});

// Builds its prompt from history and draft only; role cards never reach it.
std::vector<PredictedReaction> run_reaction_prediction(const Transcript& history,
                                                       const std::string& draft,
                                                       ChatBackend& backend,
                                                       const AgentOptions& options = {});

SafetyVerdict run_safety_analysis(const std::string& draft,
                                  const std::vector<PredictedReaction>& reactions,
                                  ChatBackend& backend,
                                  const AgentOptions& options = {});

// Summarizes a seed dialogue into a role card with one templated request.
// The returned card always passes validate_card; schema violations raise
// ParseError with the raw reply preserved.
RoleCard derive_role_card(const Transcript& seed_dialogue, ChatBackend& backend,
                          const AgentOptions& options = {});

}  // namespace emosynth
