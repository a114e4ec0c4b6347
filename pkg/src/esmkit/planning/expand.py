"""Plan expansion: templates plus constraints into per-participant actions.

Question occurrences that land in quiet hours or inside a qualifying avoid
window are displaced to the earliest feasible later minute the same day
(keeping the minimum gap to every other question that day) or dropped with
a diagnostic when no slot exists. Sensor occurrences are passive and never
displaced. Daily caps keep the highest-priority questions, earliest first.

`verify_expansion` re-validates the output against the raw constraints by
direct pairwise checks; it shares no logic with the expander on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from .. import clock
from .types import (
    AvoidWindow,
    ExperimentPlan,
    PENDING,
    ScheduledAction,
    TaskTemplate,
    action_id,
)

CONFIDENCE_THRESHOLD = 0.6


@dataclass(frozen=True)
class ExpandResult:
    actions: tuple[ScheduledAction, ...]
    diagnostics: tuple[dict, ...] = ()


def _qualifying(windows: list[AvoidWindow], threshold: float) -> list[AvoidWindow]:
    """Declared windows always count; predicted ones need enough confidence."""
    return [w for w in windows if w.source == "declared" or w.confidence >= threshold]


def expand_plan(
    plan: ExperimentPlan,
    participant: str,
    avoid: list[AvoidWindow] | None = None,
    *,
    confidence_threshold: float = CONFIDENCE_THRESHOLD,
) -> ExpandResult:
    avoid = avoid or []
    by_day: dict[date, list[AvoidWindow]] = {}
    for w in avoid:
        if w.participant == participant:
            by_day.setdefault(w.day, []).append(w)

    actions: list[ScheduledAction] = []
    diagnostics: list[dict] = []
    for day in plan.days():
        day_windows = _qualifying(by_day.get(day, []), confidence_threshold)
        actions.extend(_expand_sensors(plan, participant, day))
        placed, dropped = _place_questions(plan, participant, day, day_windows)
        actions.extend(placed)
        diagnostics.extend(dropped)
        if not placed and any(t.kind == "question" for t in plan.templates):
            diagnostics.append(
                {"day": clock.iso_date(day), "participant": participant, "issue": "no question slots"}
            )
    actions.sort(key=lambda a: (a.due_time, a.id))
    return ExpandResult(actions=tuple(actions), diagnostics=tuple(diagnostics))


def _mk_action(
    plan: ExperimentPlan, participant: str, template: TaskTemplate, day: date, nominal: int, due: int
) -> ScheduledAction:
    nominal_ts = clock.at_minute(day, nominal)
    return ScheduledAction(
        id=action_id(plan.id, participant, template.id, nominal_ts),
        plan_id=plan.id,
        participant=participant,
        template_id=template.id,
        kind=template.kind,
        due_time=clock.at_minute(day, due),
        validity_minutes=template.validity_minutes,
        priority=template.priority,
        question_kind=template.question_kind,
        sensor_kind=template.sensor_kind,
        state=PENDING,
        history=(),
    )


def _expand_sensors(plan: ExperimentPlan, participant: str, day: date) -> list[ScheduledAction]:
    out = []
    for template in plan.templates:
        if template.kind != "sensor":
            continue
        for minute in template.recurrence.occurrences():
            out.append(_mk_action(plan, participant, template, day, minute, minute))
    return out


def _place_questions(
    plan: ExperimentPlan,
    participant: str,
    day: date,
    windows: list[AvoidWindow],
) -> tuple[list[ScheduledAction], list[dict]]:
    constraints = plan.constraints
    candidates: list[tuple[int, TaskTemplate]] = []
    for template in plan.templates:
        if template.kind != "question":
            continue
        for minute in template.recurrence.occurrences():
            candidates.append((minute, template))
    # cap selection keeps highest priority, then earliest nominal time
    candidates.sort(key=lambda c: (-c[1].priority, c[0], c[1].id))

    def feasible(minute: int, placed_minutes: list[int]) -> bool:
        if constraints.quiet_hours.covers(minute):
            return False
        if any(w.covers(minute) for w in windows):
            return False
        return all(abs(minute - other) >= constraints.min_gap_minutes for other in placed_minutes)

    placed: list[ScheduledAction] = []
    placed_minutes: list[int] = []
    dropped: list[dict] = []
    for nominal, template in candidates:
        if len(placed) >= constraints.max_daily_questions:
            dropped.append(
                {
                    "day": clock.iso_date(day),
                    "participant": participant,
                    "template": template.id,
                    "nominal": clock.hhmm(nominal),
                    "issue": "daily cap reached",
                }
            )
            continue
        slot = next((m for m in range(nominal, 1440) if feasible(m, placed_minutes)), None)
        if slot is None:
            dropped.append(
                {
                    "day": clock.iso_date(day),
                    "participant": participant,
                    "template": template.id,
                    "nominal": clock.hhmm(nominal),
                    "issue": "no feasible slot",
                }
            )
            continue
        placed.append(_mk_action(plan, participant, template, day, nominal, slot))
        placed_minutes.append(slot)
    return placed, dropped


def verify_expansion(
    plan: ExperimentPlan,
    participant: str,
    avoid: list[AvoidWindow] | None,
    result: ExpandResult,
    *,
    confidence_threshold: float = CONFIDENCE_THRESHOLD,
) -> list[str]:
    """Independent constraint check; returns human-readable violations."""
    avoid = [w for w in (avoid or []) if w.participant == participant]
    violations: list[str] = []
    questions = [a for a in result.actions if a.kind == "question"]
    sensors = [a for a in result.actions if a.kind == "sensor"]
    constraints = plan.constraints

    for a in result.actions:
        if not plan.contains(a.due_time):
            violations.append(f"{a.id} due outside plan dates")

    for a in questions:
        minute = clock.minute_of_day(a.due_time)
        if constraints.quiet_hours.covers(minute):
            violations.append(f"{a.id} due inside quiet hours at {clock.hhmm(minute)}")
        for w in avoid:
            if w.day != a.due_time.date():
                continue
            if w.source != "declared" and w.confidence < confidence_threshold:
                continue
            if w.covers(minute):
                violations.append(f"{a.id} due inside avoid window {w.to_doc()}")

    by_day: dict[date, list[ScheduledAction]] = {}
    for a in questions:
        by_day.setdefault(a.due_time.date(), []).append(a)
    for day, group in sorted(by_day.items()):
        if len(group) > constraints.max_daily_questions:
            violations.append(f"{clock.iso_date(day)} exceeds daily question cap: {len(group)}")
        for i, a in enumerate(group):
            for b in group[i + 1 :]:
                gap = abs((a.due_time - b.due_time).total_seconds()) / 60
                if gap < constraints.min_gap_minutes:
                    violations.append(f"{a.id} and {b.id} only {gap:.0f} min apart")

    # sensors must sit exactly on their recurrence grid (never displaced)
    sensor_templates = {t.id: t for t in plan.templates if t.kind == "sensor"}
    for a in sensors:
        template = sensor_templates.get(a.template_id)
        if template is None:
            violations.append(f"{a.id} references unknown sensor template")
            continue
        if clock.minute_of_day(a.due_time) not in template.recurrence.occurrences():
            violations.append(f"{a.id} sensor occurrence displaced")
    return violations
