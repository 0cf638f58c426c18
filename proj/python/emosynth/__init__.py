"""Counseling dialogue synthesis and evaluation engine.

Thin convenience layer over the compiled core: dict-in/dict-out wrappers
around the JSON-string binding surface.
"""

import json as _json

from emosynth._core import (
    EmotionTerm,
    EngineError,
    EvalSession,
    ScriptedBackend,
    eds,
    eis,
    emotion_vocabulary,
    gar,
    parse_cot,
    parse_emotion,
    parse_tool_transcript,
    rls,
    score,
    serialize_cot,
    state_score,
)
from emosynth import _core

__all__ = [
    "EmotionTerm",
    "EngineError",
    "EvalSession",
    "ScriptedBackend",
    "compute_stats",
    "eds",
    "eis",
    "emotion_vocabulary",
    "export_agent_mode",
    "gar",
    "parse_cot",
    "parse_emotion",
    "parse_tool_transcript",
    "render_tool_transcript",
    "rls",
    "run_session",
    "score",
    "screen",
    "serialize_cot",
    "state_score",
    "stratified_sample",
    "validate_card",
]


def run_session(card, backend, *, mode="agent", em=True, rc=True,
                max_regenerations=3, max_turns=12):
    """Run one role-play session against a scripted backend."""
    raw = _core.run_session(_json.dumps(card), backend, mode, em, rc,
                            max_regenerations, max_turns)
    return _json.loads(raw)


def screen(session):
    """Screening decision for a session dict: (accepted, reason)."""
    return _core.screen(_json.dumps(session))


def compute_stats(sessions):
    return _json.loads(_core.compute_stats([_json.dumps(s) for s in sessions]))


def validate_card(card):
    return _core.validate_card(_json.dumps(card))


def stratified_sample(cards, n, seed=0):
    raw = _core.stratified_sample([_json.dumps(c) for c in cards], n, seed)
    return [_json.loads(c) for c in raw]


def export_agent_mode(sessions):
    raw = _core.export_agent_mode([_json.dumps(s) for s in sessions])
    return {name: [_json.loads(row) for row in rows] for name, rows in raw.items()}


def render_tool_transcript(trace):
    return _core.render_tool_transcript(_json.dumps(trace))
