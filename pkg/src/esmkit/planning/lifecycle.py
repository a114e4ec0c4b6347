"""Action lifecycle operations: delivery queries, replans, outcomes, sweeps.

Pure functions over action values; callers persist the returned events.
Expiry and snooze wake-ups are evaluated lazily from clock queries (the
service tick drives them), so no background timers exist anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

from .. import clock
from ..errors import NotFoundError, ReplanRejected
from .types import ActionState, ExperimentPlan, ReplanRequest, ScheduledAction


@dataclass(frozen=True)
class ReplanOutcome:
    action: ScheduledAction
    event_payload: dict


@dataclass(frozen=True)
class SettleOutcome:
    action: ScheduledAction
    event_payload: dict | None  # None when settlement was already recorded


def due_actions(actions: dict[str, ScheduledAction], participant: str, now: datetime) -> list[ScheduledAction]:
    """Pending actions that have come due, highest priority first."""
    due = [
        a
        for a in actions.values()
        if a.participant == participant and a.state.kind == "Pending" and a.due_time <= now
    ]
    due.sort(key=lambda a: (-a.priority, a.due_time, a.id))
    return due


def apply_replan(
    actions: dict[str, ScheduledAction],
    plan: ExperimentPlan,
    req: ReplanRequest,
    now: datetime,
) -> ReplanOutcome:
    action = actions.get(req.action_id)
    if action is None or action.participant != req.participant:
        raise NotFoundError(f"unknown action: {req.action_id}", action=req.action_id)
    if action.state.terminal:
        raise ReplanRejected("already settled", action=action.id, state=action.state.kind)

    payload = dict(req.to_doc())
    if req.op == "snooze":
        if action.state.kind not in ("Pending", "Notified"):
            raise ReplanRejected("already snoozed", action=action.id, state=action.state.kind)
        until = clock.ensure_utc(now) + timedelta(minutes=req.snooze_minutes or 0)
        updated = action.transition(ActionState("Snoozed", at=until), now)
        payload["until"] = clock.iso(until)
        return ReplanOutcome(updated, payload)

    if req.op == "move":
        if action.state.kind != "Pending":
            raise ReplanRejected(
                "only pending actions can move", action=action.id, state=action.state.kind
            )
        new_time = clock.ensure_utc(req.new_time)  # type: ignore[arg-type]
        if not plan.contains(new_time):
            raise ReplanRejected("move target outside plan dates", action=action.id)
        conflict = _gap_conflict(actions, action, new_time, plan.constraints.min_gap_minutes)
        if conflict is not None:
            raise ReplanRejected(
                f"move violates minimum gap with {conflict}", action=action.id, conflict=conflict
            )
        updated = action.with_due(new_time)
        payload["new_time"] = clock.iso(new_time)
        return ReplanOutcome(updated, payload)

    # skip
    if action.state.kind != "Pending":
        raise ReplanRejected("only pending actions can be skipped", action=action.id, state=action.state.kind)
    updated = action.transition(ActionState("Skipped"), now)
    return ReplanOutcome(updated, payload)


def _gap_conflict(
    actions: dict[str, ScheduledAction],
    moving: ScheduledAction,
    new_time: datetime,
    min_gap_minutes: int,
) -> str | None:
    for other in actions.values():
        if other.id == moving.id or other.participant != moving.participant:
            continue
        if other.kind != "question" or moving.kind != "question":
            continue
        if other.due_time.date() != new_time.date():
            continue
        gap = abs((other.due_time - new_time).total_seconds()) / 60
        if gap < min_gap_minutes:
            return other.id
    return None


def record_outcome(action: ScheduledAction, outcome: str, at: datetime) -> SettleOutcome:
    """Settle a notified action. Double settlement is an idempotent no-op."""
    if action.state.terminal:
        return SettleOutcome(action, None)
    at = clock.ensure_utc(at)
    notified_at = action.state.at if action.state.kind == "Notified" else None
    if outcome == "answered":
        updated = action.transition(ActionState("Answered", at=at), at)
    elif outcome == "expired":
        updated = action.transition(ActionState("Expired"), at)
    else:
        raise NotFoundError(f"unknown outcome: {outcome}")
    payload = {
        "participant": action.participant,
        "action": action.id,
        "outcome": outcome,
        "notified_at": clock.iso(notified_at) if notified_at else None,
        "settled_at": clock.iso(at),
    }
    if outcome == "answered" and notified_at is not None:
        payload["delay_minutes"] = (at - notified_at).total_seconds() / 60
    return SettleOutcome(updated, payload)


def sweep(actions: dict[str, ScheduledAction], now: datetime) -> list[tuple[str, str]]:
    """Lazy clock effects, deterministic order: (action id, effect) pairs
    where effect is 'wake' (snooze elapsed) or 'expire' (validity passed)."""
    now = clock.ensure_utc(now)
    effects: list[tuple[str, str]] = []
    for aid in sorted(actions):
        action = actions[aid]
        if action.state.kind == "Snoozed" and action.state.at is not None and action.state.at <= now:
            effects.append((aid, "wake"))
        elif action.state.kind == "Notified" and now > action.expiry_time:
            effects.append((aid, "expire"))
    return effects
