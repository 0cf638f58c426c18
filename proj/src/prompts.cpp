#include "emosynth/prompts.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "emosynth/assets.hpp"
#include "emosynth/emotion_json.hpp"

namespace emosynth {

namespace fs = std::filesystem;

PromptTemplate::PromptTemplate(std::string name, std::string body)
    : name_(std::move(name)), body_(std::move(body)) {
  std::size_t pos = 0;
  while ((pos = body_.find("{{", pos)) != std::string::npos) {
    const auto end = body_.find("}}", pos + 2);
    if (end == std::string::npos) {
      throw Error("template '" + name_ + "': unterminated placeholder");
    }
    const std::string placeholder = body_.substr(pos + 2, end - pos - 2);
    if (placeholder.empty() ||
        placeholder.find_first_of(" \t\r\n{}") != std::string::npos) {
      throw Error("template '" + name_ + "': malformed placeholder '{{" +
                  placeholder + "}}'");
    }
    placeholders_.insert(placeholder);
    pos = end + 2;
  }
}

std::string PromptTemplate::render(
    const std::map<std::string, std::string>& bindings) const {
  for (const auto& placeholder : placeholders_) {
    if (!bindings.count(placeholder)) {
      throw Error("template '" + name_ + "': unbound placeholder '" +
                  placeholder + "'");
    }
  }
  std::string out;
  out.reserve(body_.size());
  std::size_t pos = 0;
  while (pos < body_.size()) {
    const auto open = body_.find("{{", pos);
    if (open == std::string::npos) {
      out.append(body_, pos, std::string::npos);
      break;
    }
    out.append(body_, pos, open - pos);
    const auto close = body_.find("}}", open + 2);
    out += bindings.at(body_.substr(open + 2, close - open - 2));
    pos = close + 2;
  }
  return out;
}

namespace {

std::string asset_text(std::string_view name) {
  return std::string(embedded_asset(name));
}

std::string file_or_asset(const fs::path& dir, const std::string& filename,
                          const std::string& asset_name) {
  const fs::path path = dir / filename;
  if (fs::exists(path)) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }
  return asset_text(asset_name);
}

}  // namespace

TemplateSet TemplateSet::builtin() {
  TemplateSet set;
  set.seeker = PromptTemplate("seeker", asset_text("templates/seeker.tmpl"));
  set.eval_seeker =
      PromptTemplate("eval_seeker", asset_text("templates/eval_seeker.tmpl"));
  set.emotion_tracking = PromptTemplate(
      "emotion_tracking", asset_text("templates/emotion_tracking.tmpl"));
  set.counselor =
      PromptTemplate("counselor", asset_text("templates/counselor.tmpl"));
  set.reaction_prediction = PromptTemplate(
      "reaction_prediction", asset_text("templates/reaction_prediction.tmpl"));
  set.safety_analysis = PromptTemplate(
      "safety_analysis", asset_text("templates/safety_analysis.tmpl"));
  set.llm_mode = PromptTemplate("llm_mode", asset_text("templates/llm_mode.tmpl"));
  set.cot_compile =
      PromptTemplate("cot_compile", asset_text("templates/cot_compile.tmpl"));
  set.role_card =
      PromptTemplate("role_card", asset_text("templates/role_card.tmpl"));
  set.eft_guideline = asset_text("data/eft_guideline.txt");
  return set;
}

TemplateSet TemplateSet::load(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) {
    throw ConfigError("template directory does not exist: " + dir);
  }
  TemplateSet set;
  auto pick = [&](const char* name) {
    return PromptTemplate(
        name, file_or_asset(root, std::string(name) + ".tmpl",
                            "templates/" + std::string(name) + ".tmpl"));
  };
  set.seeker = pick("seeker");
  set.eval_seeker = pick("eval_seeker");
  set.emotion_tracking = pick("emotion_tracking");
  set.counselor = pick("counselor");
  set.reaction_prediction = pick("reaction_prediction");
  set.safety_analysis = pick("safety_analysis");
  set.llm_mode = pick("llm_mode");
  set.cot_compile = pick("cot_compile");
  set.role_card = pick("role_card");
  set.eft_guideline = file_or_asset(root, "eft_guideline.txt", "data/eft_guideline.txt");
  return set;
}

const TemplateSet& default_templates() {
  static const TemplateSet set = TemplateSet::builtin();
  return set;
}

namespace {

const TemplateSet& templates_of(const AgentOptions& options) {
  return options.templates ? *options.templates : default_templates();
}

ChatResponse call(ChatBackend& backend, const std::string& prompt,
                  const AgentOptions& options) {
  ChatRequest request;
  request.model = options.model;
  request.messages = {{MessageRole::user, prompt}};
  request.temperature = options.temperature;
  request.max_tokens = options.max_tokens;
  return backend.complete(request);
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  if (!out.empty()) {
    out.pop_back();
  }
  return out;
}

}  // namespace

std::string render_card_block(const RoleCard& card) {
  std::ostringstream out;
  out << "gender: " << card.gender << '\n'
      << "age: " << card.age << '\n'
      << "occupation: " << card.occupation << '\n'
      << "big five: openness " << card.big_five.openness << ", conscientiousness "
      << card.big_five.conscientiousness << ", extraversion "
      << card.big_five.extraversion << ", agreeableness "
      << card.big_five.agreeableness << ", neuroticism "
      << card.big_five.neuroticism << '\n'
      << "character: " << card.character << '\n'
      << "language style: " << card.language_style << '\n';
  out << "hobbies: ";
  for (std::size_t i = 0; i < card.hobbies.size(); ++i) {
    out << (i ? ", " : "") << card.hobbies[i];
  }
  out << '\n'
      << "problems: " << card.problems << '\n'
      << "inner monologue: " << card.inner_monologue << '\n'
      << "topic: " << card.topic << '\n'
      << "initial emotion: ";
  out << label_of(card.initial_emotion.primary());
  for (const auto& term : card.initial_emotion.secondary()) {
    out << " + " << label_of(term);
  }
  for (const auto& trigger : card.triggers) {
    out << "\nemotion trigger: " << trigger.event << " -> "
        << label_of(trigger.resulting_emotion.primary());
  }
  return out.str();
}

std::string render_goals_block(const RoleCard& card) {
  std::vector<std::string> lines;
  for (const auto& goal : card.goals) {
    lines.push_back("- [" + std::string(goal_kind_name(goal.kind)) + "] " +
                    goal.description);
  }
  return join_lines(lines);
}

std::string render_vocabulary_block() {
  std::vector<std::string> lines;
  for (EmotionGroup group : kAllGroups) {
    std::string line(group_name(group));
    line += ":";
    for (int intensity = 1; intensity <= 3; ++intensity) {
      line += ' ';
      line += label_of(EmotionTerm{group, intensity});
      line += intensity < 3 ? "," : "";
    }
    lines.push_back(std::move(line));
  }
  return join_lines(lines);
}

std::string render_analysis_block(const EmotionAnalysis& analysis) {
  std::string state(label_of(analysis.state.primary()));
  for (const auto& term : analysis.state.secondary()) {
    state += " + ";
    state += label_of(term);
  }
  return "current emotion: " + state + "\nrecent shifts: " + analysis.recent_shifts +
         "\noverall trend: " + analysis.overall_trend +
         "\ncauses: " + analysis.causes;
}

std::string render_reactions_block(const std::vector<PredictedReaction>& reactions) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < reactions.size(); ++i) {
    lines.push_back("[" + std::to_string(i) + "] " +
                    std::string(behavior_name(reactions[i].behavior)) + ": " +
                    reactions[i].reaction_text);
  }
  return join_lines(lines);
}

std::string build_seeker_prompt(const RoleCard& card, const Transcript& history,
                                const AgentOptions& options) {
  return templates_of(options).seeker.render({
      {"card", render_card_block(card)},
      {"goals", render_goals_block(card)},
      {"history", render_history(history)},
      {"emotion_vocabulary", render_vocabulary_block()},
  });
}

std::string build_eval_seeker_prompt(const RoleCard& card, const Transcript& history,
                                     const AgentOptions& options) {
  return templates_of(options).eval_seeker.render({
      {"card", render_card_block(card)},
      {"goals", render_goals_block(card)},
      {"history", render_history(history)},
      {"emotion_vocabulary", render_vocabulary_block()},
  });
}

std::string build_tracking_prompt(const Transcript& history,
                                  const EmotionMemory& memory,
                                  const AgentOptions& options) {
  std::string latest;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->speaker == Speaker::seeker) {
      latest = it->text;
      break;
    }
  }
  return templates_of(options).emotion_tracking.render({
      {"history", render_history(history)},
      {"latest_seeker_response", latest},
      {"memory", memory.render(options.memory_window)},
      {"emotion_vocabulary", render_vocabulary_block()},
  });
}

std::string build_counselor_prompt(const Transcript& history,
                                   const std::optional<EmotionAnalysis>& analysis,
                                   const std::optional<std::string>& suggestions,
                                   const AgentOptions& options) {
  std::string analysis_block;
  if (analysis) {
    analysis_block =
        "\n== Emotion analysis ==\n" + render_analysis_block(*analysis) + "\n";
  }
  std::string suggestions_block;
  if (suggestions) {
    suggestions_block =
        "\n== Safety modification suggestions for this redraft ==\n" +
        *suggestions + "\n";
  }
  return templates_of(options).counselor.render({
      {"guideline", templates_of(options).eft_guideline},
      {"history", render_history(history)},
      {"analysis_block", analysis_block},
      {"suggestions_block", suggestions_block},
  });
}

std::string build_reaction_prompt(const Transcript& history, const std::string& draft,
                                  const AgentOptions& options) {
  std::vector<std::string> behaviors;
  for (Behavior behavior : options.behaviors) {
    behaviors.push_back("- " + std::string(behavior_name(behavior)));
  }
  return templates_of(options).reaction_prediction.render({
      {"history", render_history(history)},
      {"draft", draft},
      {"behaviors", join_lines(behaviors)},
  });
}

std::string build_safety_prompt(const std::string& draft,
                                const std::vector<PredictedReaction>& reactions,
                                const AgentOptions& options) {
  std::string history_block;
  if (options.safety_history) {
    history_block = "\n== Conversation so far ==\n" +
                    render_history(*options.safety_history) + "\n";
  }
  return templates_of(options).safety_analysis.render({
      {"draft", draft},
      {"reactions", render_reactions_block(reactions)},
      {"history_block", history_block},
  });
}

SeekerOutput run_seeker(const RoleCard& card, const Transcript& history,
                        ChatBackend& backend, const AgentOptions& options) {
  const auto violations = validate_card(card);
  if (!violations.empty()) {
    throw PreconditionError("invalid role card: " + violations.front());
  }
  const ChatResponse reply = call(backend, build_seeker_prompt(card, history, options), options);
  return parse_seeker_output(reply.content);
}

EvalSeekerTurn run_eval_seeker(const RoleCard& card, const Transcript& history,
                               ChatBackend& backend, const AgentOptions& options) {
  const auto violations = validate_card(card);
  if (!violations.empty()) {
    throw PreconditionError("invalid role card: " + violations.front());
  }
  const ChatResponse reply =
      call(backend, build_eval_seeker_prompt(card, history, options), options);
  EvalSeekerTurn turn;
  turn.output = parse_seeker_output(reply.content);
  const nlohmann::json doc = extract_reply_json(reply.content);
  turn.risk = doc.value("risk", 0.0);
  if (turn.risk < 0.0 || turn.risk > 1.0) {
    throw ParseError("risk annotation must lie in [0, 1], got " +
                         std::to_string(turn.risk),
                     reply.content);
  }
  return turn;
}

EmotionAnalysis run_emotion_tracking(const Transcript& history,
                                     const EmotionMemory& memory,
                                     ChatBackend& backend,
                                     const AgentOptions& options) {
  const bool has_seeker_turn =
      std::any_of(history.begin(), history.end(),
                  [](const Utterance& u) { return u.speaker == Speaker::seeker; });
  if (!has_seeker_turn) {
    throw PreconditionError("emotion tracking requires at least one seeker turn");
  }
  const ChatResponse reply =
      call(backend, build_tracking_prompt(history, memory, options), options);
  return parse_emotion_analysis(reply.content);
}

CounselorDraft run_counselor(const Transcript& history,
                             const std::optional<EmotionAnalysis>& analysis,
                             const std::optional<std::string>& suggestions,
                             ChatBackend& backend, const AgentOptions& options) {
  const ChatResponse reply = call(
      backend, build_counselor_prompt(history, analysis, suggestions, options), options);
  return parse_counselor_draft(reply.content);
}

std::vector<PredictedReaction> run_reaction_prediction(const Transcript& history,
                                                       const std::string& draft,
                                                       ChatBackend& backend,
                                                       const AgentOptions& options) {
  if (draft.empty()) {
    throw PreconditionError("reaction prediction requires a non-empty draft");
  }
  const ChatResponse reply =
      call(backend, build_reaction_prompt(history, draft, options), options);
  return parse_reactions(reply.content, options.behaviors);
}

SafetyVerdict run_safety_analysis(const std::string& draft,
                                  const std::vector<PredictedReaction>& reactions,
                                  ChatBackend& backend, const AgentOptions& options) {
  if (reactions.empty()) {
    throw PreconditionError("safety analysis requires predicted reactions");
  }
  const ChatResponse reply =
      call(backend, build_safety_prompt(draft, reactions, options), options);
  return parse_safety_verdict(reply.content, reactions.size());
}

RoleCard derive_role_card(const Transcript& seed_dialogue, ChatBackend& backend,
                          const AgentOptions& options) {
  if (seed_dialogue.empty()) {
    throw PreconditionError("seed dialogue must be non-empty");
  }
  std::vector<std::string> topics;
  for (const auto& topic : topic_labels()) {
    topics.push_back("- " + topic);
  }
  const std::string prompt = templates_of(options).role_card.render({
      {"seed_dialogue", render_history(seed_dialogue)},
      {"topics", join_lines(topics)},
      {"emotion_vocabulary", render_vocabulary_block()},
  });
  const ChatResponse reply = call(backend, prompt, options);
  RoleCard card;
  try {
    card = card_from_json(extract_reply_json(reply.content));
  } catch (const ParseError& ex) {
    throw ParseError(ex.what(), reply.content);
  }
  const auto violations = validate_card(card);
  if (!violations.empty()) {
    std::string message = "derived card violates invariants: ";
    for (std::size_t i = 0; i < violations.size(); ++i) {
      message += (i ? "; " : "") + violations[i];
    }
    throw ParseError(message, reply.content);
  }
  return card;
}

}  // namespace emosynth
