"""Plan expansion, replans and outcome settlement against spec'd scenarios."""

from __future__ import annotations

from datetime import date

import pytest

from esmkit import clock
from esmkit.errors import IllegalTransitionError, ReplanRejected
from esmkit.planning import (
    ActionState,
    AvoidWindow,
    ExperimentPlan,
    PlanConstraints,
    QuietHours,
    Recurrence,
    ReplanRequest,
    ScheduledAction,
    TaskTemplate,
    apply_replan,
    due_actions,
    expand_plan,
    record_outcome,
    sweep,
    verify_expansion,
)

DAY0 = date(2026, 1, 5)


def make_plan(templates, *, days=3, min_gap=30, quiet=None, cap=1000) -> ExperimentPlan:
    return ExperimentPlan(
        id="plan-1",
        researcher="r1",
        start_date=DAY0,
        end_date=date(2026, 1, 5 + days),
        templates=tuple(templates),
        constraints=PlanConstraints(
            min_gap_minutes=min_gap,
            quiet_hours=QuietHours(*quiet) if quiet else QuietHours(),
            max_daily_questions=cap,
        ),
    )


def question(tid="q1", times=("10:00",), priority=1, validity=60) -> TaskTemplate:
    return TaskTemplate(
        id=tid,
        kind="question",
        question_kind="what",
        recurrence=Recurrence(daily_times=tuple(clock.parse_hhmm(t) for t in times)),
        validity_minutes=validity,
        priority=priority,
    )


def test_daily_question_expands_once_per_day():
    plan = make_plan([question()])
    result = expand_plan(plan, "p1", [])
    assert len(result.actions) == 3
    assert all(clock.minute_of_day(a.due_time) == 600 for a in result.actions)
    assert sorted({a.due_time.date() for a in result.actions}) == plan.days()
    assert verify_expansion(plan, "p1", [], result) == []


def test_avoid_window_displaces_to_earliest_feasible_slot():
    plan = make_plan([question()], days=1)
    window = AvoidWindow("p1", DAY0, clock.parse_hhmm("09:00"), clock.parse_hhmm("11:00"), "predicted", 0.9)
    result = expand_plan(plan, "p1", [window])
    assert len(result.actions) == 1
    got = clock.minute_of_day(result.actions[0].due_time)

    # oracle: enumerate every minute of the day, earliest feasible >= nominal
    feasible = [
        m
        for m in range(600, 1440)
        if not (window.start_minute <= m < window.end_minute)
    ]
    assert got == feasible[0] == clock.parse_hhmm("11:00")
    assert verify_expansion(plan, "p1", [window], result) == []


def test_low_confidence_window_ignored():
    plan = make_plan([question()], days=1)
    weak = AvoidWindow("p1", DAY0, 540, 660, "predicted", 0.4)
    result = expand_plan(plan, "p1", [weak])
    assert clock.minute_of_day(result.actions[0].due_time) == 600


def test_declared_window_always_honored():
    plan = make_plan([question()], days=1)
    declared = AvoidWindow("p1", DAY0, 540, 660, "declared", 0.0)
    result = expand_plan(plan, "p1", [declared])
    assert clock.minute_of_day(result.actions[0].due_time) == 660


def test_daily_cap_keeps_highest_priority():
    templates = [
        question("q-low", times=("09:00",), priority=1),
        question("q-mid", times=("12:00",), priority=2),
        question("q-high", times=("15:00",), priority=3),
    ]
    plan = make_plan(templates, days=1, cap=2)
    result = expand_plan(plan, "p1", [])

    # oracle: brute-force selection by (priority desc, time asc)
    ranked = sorted([(1, 540, "q-low"), (2, 720, "q-mid"), (3, 900, "q-high")], key=lambda x: (-x[0], x[1]))
    expected = {tid for _, _, tid in ranked[:2]}
    assert {a.template_id for a in result.actions} == expected == {"q-high", "q-mid"}
    assert any(d["issue"] == "daily cap reached" for d in result.diagnostics)
    assert verify_expansion(plan, "p1", [], result) == []


def test_all_day_quiet_hours_yield_zero_questions_with_diagnostic():
    plan = make_plan([question()], days=1, quiet=(0, 1440))
    result = expand_plan(plan, "p1", [])
    assert result.actions == ()
    assert any(d["issue"] == "no question slots" for d in result.diagnostics)


def test_sensor_actions_never_displaced():
    sensor = TaskTemplate(
        id="s1",
        kind="sensor",
        sensor_kind="geo",
        recurrence=Recurrence(every_minutes=360),
        validity_minutes=30,
    )
    plan = make_plan([sensor], days=1, quiet=(0, 1440))
    window = AvoidWindow("p1", DAY0, 0, 1440, "declared", 1.0)
    result = expand_plan(plan, "p1", [window])
    assert [clock.minute_of_day(a.due_time) for a in result.actions] == [0, 360, 720, 1080]
    assert verify_expansion(plan, "p1", [window], result) == []


def test_min_gap_enforced_between_templates():
    templates = [
        question("qa", times=("10:00",), priority=2),
        question("qb", times=("10:10",), priority=1),
    ]
    plan = make_plan(templates, days=1, min_gap=30)
    result = expand_plan(plan, "p1", [])
    minutes = sorted(clock.minute_of_day(a.due_time) for a in result.actions)
    assert minutes == [600, 630]
    assert verify_expansion(plan, "p1", [], result) == []


def test_expansion_is_deterministic_including_ids():
    plan = make_plan([question("qa", times=("08:00", "14:00")), question("qb", times=("20:00",))])
    window = AvoidWindow("p1", DAY0, 480, 540, "predicted", 0.9)
    r1 = expand_plan(plan, "p1", [window])
    r2 = expand_plan(plan, "p1", [window])
    assert [a.to_doc() for a in r1.actions] == [a.to_doc() for a in r2.actions]


# -- replans -------------------------------------------------------------------


def _single_action(plan=None):
    plan = plan or make_plan([question()], days=3)
    result = expand_plan(plan, "p1", [])
    actions = {a.id: a for a in result.actions}
    first = min(actions.values(), key=lambda a: a.due_time)
    return plan, actions, first


def test_snooze_moves_due_after_wake():
    plan, actions, action = _single_action()
    now = action.due_time
    req = ReplanRequest(action.id, "p1", "snooze", now, snooze_minutes=30)
    outcome = apply_replan(actions, plan, req, now)
    assert outcome.action.state.kind == "Snoozed"
    actions[action.id] = outcome.action

    until = outcome.action.state.at
    assert until == now + 30 * clock.MINUTE
    effects = sweep(actions, until)
    assert effects == [(action.id, "wake")]
    woken = actions[action.id].with_due(until).transition(ActionState("Pending"), until)
    assert clock.minute_of_day(woken.due_time) == 630


def test_skip_is_terminal():
    plan, actions, action = _single_action()
    req = ReplanRequest(action.id, "p1", "skip", action.due_time)
    outcome = apply_replan(actions, plan, req, action.due_time)
    assert outcome.action.state.kind == "Skipped"
    actions[action.id] = outcome.action
    assert due_actions(actions, "p1", action.due_time + clock.DAY) == [
        a for a in sorted(actions.values(), key=lambda x: x.due_time) if a.state.kind == "Pending" and a.due_time <= action.due_time + clock.DAY
    ]
    with pytest.raises(ReplanRejected, match="already settled"):
        apply_replan(actions, plan, req, action.due_time)


def test_move_violating_min_gap_rejected_with_conflict():
    templates = [question("qa", times=("10:00",)), question("qb", times=("11:00",))]
    plan = make_plan(templates, days=1, min_gap=30)
    result = expand_plan(plan, "p1", [])
    actions = {a.id: a for a in result.actions}
    qa = next(a for a in actions.values() if a.template_id == "qa")
    qb = next(a for a in actions.values() if a.template_id == "qb")

    req = ReplanRequest(qa.id, "p1", "move", qa.due_time, new_time=qb.due_time + 10 * clock.MINUTE)
    with pytest.raises(ReplanRejected) as exc:
        apply_replan(actions, plan, req, qa.due_time)
    assert exc.value.details["conflict"] == qb.id


def test_move_outside_plan_dates_rejected():
    plan, actions, action = _single_action()
    req = ReplanRequest(action.id, "p1", "move", action.due_time, new_time=action.due_time + 30 * clock.DAY)
    with pytest.raises(ReplanRejected, match="outside plan dates"):
        apply_replan(actions, plan, req, action.due_time)


def test_snooze_duration_bounds():
    with pytest.raises(Exception):
        ReplanRequest("a", "p1", "snooze", clock.utc(2026, 1, 5), snooze_minutes=0)
    with pytest.raises(Exception):
        ReplanRequest("a", "p1", "snooze", clock.utc(2026, 1, 5), snooze_minutes=25 * 60)


# -- outcomes ------------------------------------------------------------------


def test_answer_outcome_reports_delay():
    plan, actions, action = _single_action()
    notified = action.transition(ActionState("Notified", at=action.due_time), action.due_time)
    settled = record_outcome(notified, "answered", action.due_time + 7 * clock.MINUTE)
    assert settled.action.state.kind == "Answered"
    assert settled.event_payload["delay_minutes"] == 7.0


def test_expiry_via_clock_step_simulation():
    plan, actions, action = _single_action()
    notified = action.transition(ActionState("Notified", at=action.due_time), action.due_time)
    actions[action.id] = notified

    # oracle: step the clock minute by minute; expiry fires strictly after
    # due + validity (60 min)
    fired_at = None
    for step in range(0, 90):
        now = action.due_time + step * clock.MINUTE
        effects = sweep(actions, now)
        if effects:
            assert effects == [(action.id, "expire")]
            fired_at = step
            break
    assert fired_at == 61


def test_double_settlement_is_idempotent():
    plan, actions, action = _single_action()
    notified = action.transition(ActionState("Notified", at=action.due_time), action.due_time)
    first = record_outcome(notified, "answered", action.due_time + 5 * clock.MINUTE)
    second = record_outcome(first.action, "answered", action.due_time + 9 * clock.MINUTE)
    assert second.action == first.action
    assert second.event_payload is None


def test_due_actions_order_and_delivery_gate():
    templates = [
        question("qa", times=("10:00",), priority=1),
        question("qb", times=("10:30",), priority=5),
    ]
    plan = make_plan(templates, days=1, min_gap=0)
    actions = {a.id: a for a in expand_plan(plan, "p1", []).actions}
    now = clock.at_minute(DAY0, 631)
    due = due_actions(actions, "p1", now)
    assert [a.template_id for a in due] == ["qb", "qa"]  # priority first


def test_illegal_transition_rejected():
    plan, actions, action = _single_action()
    with pytest.raises(IllegalTransitionError):
        action.transition(ActionState("Answered", at=action.due_time), action.due_time)
