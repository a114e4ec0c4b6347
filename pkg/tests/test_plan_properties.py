"""Randomized schedule properties; the acceptance suite scales these up."""

from __future__ import annotations

import random

from esmkit import clock
from esmkit.planning import ExperimentState
from esmkit.stores import StmEvent

from helpers import check_random_expansion, legal_history, run_random_op_sequence


def test_random_op_sequences_keep_histories_legal():
    rng = random.Random(2026)
    for _ in range(300):
        for action in run_random_op_sequence(rng):
            assert legal_history(action), action


def test_random_expansions_pass_independent_verifier():
    rng = random.Random(99)
    for _ in range(100):
        assert check_random_expansion(rng) == []


def _scripted_events() -> list[StmEvent]:
    t = clock.utc(2026, 3, 2, 10, 0)
    plan_doc = {
        "id": "plan-1",
        "researcher": "r1",
        "start_date": "2026-03-02",
        "end_date": "2026-03-04",
        "templates": [
            {
                "id": "q1",
                "kind": "question",
                "question_kind": "what",
                "recurrence": {"times": ["10:00"]},
                "validity_minutes": 60,
                "priority": 1,
            }
        ],
        "constraints": {"min_gap_minutes": 30, "quiet_hours": None, "max_daily_questions": 4},
    }
    action_doc = {
        "id": "a1",
        "plan": "plan-1",
        "participant": "p1",
        "template": "q1",
        "kind": "question",
        "due_time": clock.iso(t),
        "validity_minutes": 60,
        "priority": 1,
        "question_kind": "what",
        "state": {"kind": "Pending"},
        "history": [],
    }
    payloads = [
        ("PlanCreated", {"plan": plan_doc}),
        ("ParticipantEnrolled", {"participant": "p1", "attributes": {"department": 1}}),
        ("ActionsExpanded", {"plan": "plan-1", "participant": "p1", "actions": [action_doc], "diagnostics": []}),
        ("StateTransition", {"participant": "p1", "action": "a1", "to": {"kind": "Notified", "at": clock.iso(t)}, "at": clock.iso(t)}),
        (
            "Replan",
            {
                "participant": "p1",
                "action": "a1",
                "op": "snooze",
                "requested_at": clock.iso(t + clock.MINUTE),
                "snooze_minutes": 30,
                "until": clock.iso(t + 31 * clock.MINUTE),
            },
        ),
        (
            "StateTransition",
            {
                "participant": "p1",
                "action": "a1",
                "to": {"kind": "Pending"},
                "at": clock.iso(t + 31 * clock.MINUTE),
                "due_time": clock.iso(t + 31 * clock.MINUTE),
            },
        ),
        (
            "StateTransition",
            {"participant": "p1", "action": "a1", "to": {"kind": "Notified", "at": clock.iso(t + 31 * clock.MINUTE)}, "at": clock.iso(t + 31 * clock.MINUTE)},
        ),
        (
            "Outcome",
            {
                "participant": "p1",
                "action": "a1",
                "outcome": "answered",
                "notified_at": clock.iso(t + 31 * clock.MINUTE),
                "settled_at": clock.iso(t + 38 * clock.MINUTE),
                "delay_minutes": 7.0,
            },
        ),
        (
            "AvoidWindowsPublished",
            {"participant": "p1", "date": "2026-03-03", "windows": [{"participant": "p1", "date": "2026-03-03", "start": "09:00", "end": "11:00", "source": "predicted", "confidence": 0.8}]},
        ),
        ("GoalSet", {"goal": {"id": "g1", "participant": "p1", "metric": "answers_per_day", "target": 5, "window_days": 7}}),
        ("GoalRemoved", {"goal": "g1"}),
    ]
    return [
        StmEvent(seq=i + 1, kind=kind, payload=payload, recorded_at=t)
        for i, (kind, payload) in enumerate(payloads)
    ]


def test_event_fold_replay_is_byte_identical():
    events = _scripted_events()
    s1 = ExperimentState.fold(events)
    s2 = ExperimentState.fold(events)
    assert s1.canonical() == s2.canonical()

    action = s1.actions["a1"]
    assert action.state.kind == "Answered"
    assert legal_history(action)
    assert s1.outcomes["a1"]["delay_minutes"] == 7.0
    assert s1.windows_for("p1", "2026-03-03")
    assert s1.goals == {}


def test_fold_prefixes_are_valid_states():
    events = _scripted_events()
    for k in range(len(events) + 1):
        state = ExperimentState.fold(events[:k])
        for action in state.actions.values():
            assert legal_history(action)
