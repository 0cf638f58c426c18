#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "emosynth/config.hpp"
#include "emosynth/metrics.hpp"
#include "emosynth/synthesis.hpp"

namespace py = pybind11;
using namespace emosynth;
using nlohmann::json;

namespace {

PipelineConfig make_pipeline_config(const std::string& mode, bool em, bool rc,
                                    int max_regenerations) {
  PipelineConfig config;
  config.mode = parse_mode(mode);
  config.em_enabled = em;
  config.rc_enabled = rc;
  config.max_regenerations = max_regenerations;
  return config;
}

StateScorePolicy parse_policy(const std::string& policy) {
  if (policy == "primary_only") return StateScorePolicy::primary_only;
  if (policy == "mean_with_secondaries") return StateScorePolicy::mean_with_secondaries;
  throw Error("unknown state score policy: '" + policy + "'");
}

EmotionState state_from_labels(const std::string& primary,
                               const std::vector<std::string>& secondary) {
  std::vector<EmotionTerm> terms;
  for (const auto& label : secondary) {
    terms.push_back(parse_emotion(label));
  }
  return EmotionState(parse_emotion(primary), std::move(terms));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Counseling dialogue synthesis and evaluation engine";

  py::register_exception<Error>(m, "EngineError");

  py::class_<EmotionTerm>(m, "EmotionTerm")
      .def_property_readonly(
          "group", [](EmotionTerm t) { return std::string(group_name(t.group)); })
      .def_readonly("intensity", &EmotionTerm::intensity)
      .def_property_readonly(
          "label", [](EmotionTerm t) { return std::string(label_of(t)); })
      .def("__eq__", [](EmotionTerm a, EmotionTerm b) { return a == b; })
      .def("__repr__", [](EmotionTerm t) {
        return "EmotionTerm(" + std::string(label_of(t)) + ")";
      });

  m.def("parse_emotion", [](const std::string& label) { return parse_emotion(label); },
        py::arg("label"), "Look up one of the 24 Plutchik terms by label");
  m.def("emotion_vocabulary", []() { return emotion_vocabulary(); });
  m.def(
      "score", [](const std::string& label) { return score(parse_emotion(label)); },
      py::arg("label"), "Signed score of a term under the default valence table");
  m.def(
      "state_score",
      [](const std::string& primary, const std::vector<std::string>& secondary,
         const std::string& policy) {
        return state_score(state_from_labels(primary, secondary),
                           default_valence(), parse_policy(policy));
      },
      py::arg("primary"), py::arg("secondary") = std::vector<std::string>{},
      py::arg("policy") = "primary_only");

  py::class_<EvalSession>(m, "EvalSession")
      .def(py::init<>())
      .def_readwrite("card_id", &EvalSession::card_id)
      .def_readwrite("initial_score", &EvalSession::initial_score)
      .def_readwrite("goals_total", &EvalSession::goals_total)
      .def_readwrite("goals_completed", &EvalSession::goals_completed)
      .def(
          "add_turn",
          [](EvalSession& session, double score, double risk) {
            const double previous = session.annotations.empty()
                                        ? session.initial_score
                                        : session.annotations.back().emotion_score;
            session.annotations.push_back(
                {static_cast<int>(session.annotations.size()), score,
                 score - previous, risk});
          },
          py::arg("score"), py::arg("risk") = 0.0)
      .def_property_readonly("turns", &EvalSession::turn_count);

  m.def("eis", &eis, py::arg("session"));
  m.def("eds", &eds, py::arg("session"));
  m.def("gar", &gar, py::arg("session"));
  m.def("rls", &rls, py::arg("session"));

  py::class_<ScriptedBackend>(m, "ScriptedBackend")
      .def(py::init<>())
      .def(
          "push",
          [](ScriptedBackend& backend, const std::string& content,
             const std::optional<std::string>& key) {
            backend.push_content(content, key);
          },
          py::arg("content"), py::arg("key") = std::nullopt)
      .def_property_readonly("remaining", &ScriptedBackend::remaining);

  m.def(
      "run_session",
      [](const std::string& card_json, ScriptedBackend& backend,
         const std::string& mode, bool em, bool rc, int max_regenerations,
         int max_turns) {
        const RoleCard card = card_from_json(json::parse(card_json));
        SessionOptions options;
        options.clock = []() -> std::int64_t { return 0; };
        const DialogueSession session =
            run_session(card, make_pipeline_config(mode, em, rc, max_regenerations),
                        backend, max_turns, options);
        return session_to_json(session).dump();
      },
      py::arg("card_json"), py::arg("backend"), py::arg("mode") = "agent",
      py::arg("em") = true, py::arg("rc") = true, py::arg("max_regenerations") = 3,
      py::arg("max_turns") = 12,
      "Run one role-play session against a scripted backend; returns session JSON");

  m.def(
      "screen",
      [](const std::string& session_json) {
        const ScreenResult result =
            screen(session_from_json(json::parse(session_json)));
        return py::make_tuple(result.accepted, result.reason);
      },
      py::arg("session_json"), "Screening decision (accepted, reason)");

  m.def(
      "compute_stats",
      [](const std::vector<std::string>& session_jsons) {
        std::vector<DialogueSession> sessions;
        for (const auto& text : session_jsons) {
          sessions.push_back(session_from_json(json::parse(text)));
        }
        return stats_to_json(compute_stats(sessions)).dump();
      },
      py::arg("session_jsons"));

  m.def(
      "validate_card",
      [](const std::string& card_json) {
        return validate_card(card_from_json(json::parse(card_json)));
      },
      py::arg("card_json"));

  m.def(
      "stratified_sample",
      [](const std::vector<std::string>& card_jsons, std::size_t n,
         std::uint64_t seed) {
        std::vector<RoleCard> cards;
        for (const auto& text : card_jsons) {
          cards.push_back(card_from_json(json::parse(text)));
        }
        std::vector<std::string> out;
        for (const auto& card : stratified_sample(cards, n, seed)) {
          out.push_back(card_to_json(card).dump());
        }
        return out;
      },
      py::arg("card_jsons"), py::arg("n"), py::arg("seed") = 0);

  m.def(
      "export_agent_mode",
      [](const std::vector<std::string>& session_jsons) {
        std::vector<DialogueSession> sessions;
        for (const auto& text : session_jsons) {
          sessions.push_back(session_from_json(json::parse(text)));
        }
        const AgentModeExport exported = export_agent_mode(sessions);
        auto dump_rows = [](const std::vector<json>& rows) {
          std::vector<std::string> out;
          for (const auto& row : rows) {
            out.push_back(row.dump());
          }
          return out;
        };
        py::dict result;
        result["tracking"] = dump_rows(exported.tracking);
        result["counselor"] = dump_rows(exported.counselor);
        result["safety"] = dump_rows(exported.safety);
        result["seeker"] = dump_rows(exported.seeker);
        return result;
      },
      py::arg("session_jsons"));

  m.def("render_tool_transcript", [](const std::string& trace_json) {
    return render_tool_transcript(trace_from_json(json::parse(trace_json)));
  });
  m.def("parse_tool_transcript", [](const std::string& text) {
    const ToolTranscript transcript = parse_tool_transcript(text);
    json events = json::array();
    for (const auto& event : transcript.tool_events) {
      events.push_back({{"call", event.call}, {"response", event.response}});
    }
    return py::make_tuple(events.dump(), transcript.final_response);
  });

  m.def("serialize_cot", [](const std::string& tracking, const std::string& plan,
                            const std::string& risk, const std::string& integration,
                            const std::string& response) {
    return serialize_cot({tracking, plan, risk, integration, response});
  });
  m.def("parse_cot", [](const std::string& text) {
    const CotRecord record = parse_cot(text);
    py::dict out;
    out["emotion_shift_tracking"] = record.emotion_shift_tracking;
    out["counseling_plan"] = record.counseling_plan;
    out["safety_risk_analysis"] = record.safety_risk_analysis;
    out["integration"] = record.integration;
    out["response"] = record.response;
    return out;
  });
}
