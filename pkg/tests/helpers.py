"""Shared randomized drivers and independent validators for property tests.

The acceptance suite runs these at the spec'd scale; module tests reuse
them with smaller counts.
"""

from __future__ import annotations

import random
from datetime import date, timedelta

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
from esmkit.planning.types import LEGAL_TRANSITIONS

BASE_DAY = date(2026, 3, 2)


def legal_history(action: ScheduledAction) -> bool:
    """Re-validate an action's recorded transitions against the legal graph."""
    current = "Pending"
    last_ts = None
    for kind, at_iso in action.history:
        if kind not in LEGAL_TRANSITIONS[current]:
            return False
        ts = clock.parse_iso(at_iso)
        if last_ts is not None and ts < last_ts:
            return False
        current = kind
        last_ts = ts
    return current == action.state.kind


def random_plan(rng: random.Random, *, max_days: int = 3) -> ExperimentPlan:
    n_days = rng.randint(1, max_days)
    templates = []
    for i in range(rng.randint(1, 3)):
        times = sorted(rng.sample(range(0, 1440, 15), rng.randint(1, 4)))
        templates.append(
            TaskTemplate(
                id=f"q{i}",
                kind="question",
                question_kind=rng.choice(("what", "where", "mood")),
                recurrence=Recurrence(daily_times=tuple(times)),
                validity_minutes=rng.choice((15, 30, 60, 120)),
                priority=rng.randint(0, 3),
            )
        )
    if rng.random() < 0.4:
        templates.append(
            TaskTemplate(
                id="s0",
                kind="sensor",
                sensor_kind="geo",
                recurrence=Recurrence(every_minutes=rng.choice((60, 180, 360))),
                validity_minutes=30,
            )
        )
    if rng.random() < 0.7:
        start = rng.randrange(0, 1440, 30)
        end = rng.randrange(0, 1441, 30)
        quiet = QuietHours(start, end) if start != end else QuietHours()
    else:
        quiet = QuietHours()
    return ExperimentPlan(
        id="plan-r",
        researcher="r1",
        start_date=BASE_DAY,
        end_date=BASE_DAY + timedelta(days=n_days),
        templates=tuple(templates),
        constraints=PlanConstraints(
            min_gap_minutes=rng.choice((0, 10, 30, 60)),
            quiet_hours=quiet,
            max_daily_questions=rng.choice((1, 2, 4, 8, 1000)),
        ),
    )


def random_windows(rng: random.Random, plan: ExperimentPlan, participant: str) -> list[AvoidWindow]:
    windows = []
    for day in plan.days():
        for _ in range(rng.randint(0, 3)):
            start = rng.randrange(0, 1410, 30)
            end = rng.randrange(start + 30, min(start + 360, 1441), 30)
            windows.append(
                AvoidWindow(
                    participant=participant,
                    day=day,
                    start_minute=start,
                    end_minute=end,
                    source=rng.choice(("predicted", "predicted", "declared")),
                    confidence=round(rng.random(), 2),
                )
            )
    return windows


def run_random_op_sequence(rng: random.Random, ops: int = 12) -> list[ScheduledAction]:
    """Drive a schedule with random deliveries, replans, answers and sweeps.

    Rejections are expected and swallowed; any IllegalTransitionError from a
    committed path or an inconsistent history is a failure surfaced by the
    caller via `legal_history`.
    """
    plan = random_plan(rng, max_days=1)
    actions = {a.id: a for a in expand_plan(plan, "p1", []).actions}
    if not actions:
        return []
    now = clock.at_minute(plan.start_date, 0)

    for _ in range(ops):
        now += rng.randint(0, 240) * clock.MINUTE
        op = rng.choice(("deliver", "snooze", "move", "skip", "answer", "sweep"))
        try:
            if op == "deliver":
                for action in due_actions(actions, "p1", now):
                    actions[action.id] = action.transition(ActionState("Notified", at=now), now)
            elif op == "sweep":
                for aid, effect in sweep(actions, now):
                    action = actions[aid]
                    if effect == "wake":
                        until = action.state.at
                        actions[aid] = action.with_due(until).transition(ActionState("Pending"), now)
                    else:
                        actions[aid] = record_outcome(action, "expired", now).action
            elif op == "answer":
                notified = [a for a in actions.values() if a.state.kind == "Notified"]
                if notified:
                    target = rng.choice(notified)
                    actions[target.id] = record_outcome(target, "answered", now).action
            else:
                target = rng.choice(list(actions.values()))
                if op == "snooze":
                    req = ReplanRequest(target.id, "p1", "snooze", now, snooze_minutes=rng.randint(1, 1440))
                elif op == "move":
                    req = ReplanRequest(
                        target.id,
                        "p1",
                        "move",
                        now,
                        new_time=clock.at_minute(plan.start_date, rng.randrange(0, 1440)),
                    )
                else:
                    req = ReplanRequest(target.id, "p1", "skip", now)
                outcome = apply_replan(actions, plan, req, now)
                actions[outcome.action.id] = outcome.action
        except ReplanRejected:
            continue
    return list(actions.values())


def check_random_expansion(rng: random.Random) -> list[str]:
    plan = random_plan(rng)
    windows = random_windows(rng, plan, "p1")
    result = expand_plan(plan, "p1", windows)
    return verify_expansion(plan, "p1", windows, result)
