"""Event-sourced schedule state: a deterministic fold over the STM stream.

The service applies events to its live state through the same `apply`
used when rebuilding from the log, so replay from empty reconstructs the
exact same state byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .. import clock
from ..canonical import canonical_bytes
from ..errors import SchemaError
from ..stores import StmEvent
from .types import ActionState, ExperimentPlan, ScheduledAction


@dataclass
class ExperimentState:
    plans: dict[str, ExperimentPlan] = field(default_factory=dict)
    participants: dict[str, dict] = field(default_factory=dict)
    actions: dict[str, ScheduledAction] = field(default_factory=dict)
    replans: list[dict] = field(default_factory=list)
    outcomes: dict[str, dict] = field(default_factory=dict)
    avoid_windows: dict[str, dict[str, list[dict]]] = field(default_factory=dict)
    goals: dict[str, dict] = field(default_factory=dict)
    diagnostics: list[dict] = field(default_factory=list)
    last_seq: int = 0

    # -- fold ------------------------------------------------------------------

    def apply(self, event: StmEvent) -> None:
        handler = getattr(self, f"_apply_{_snake(event.kind)}", None)
        if handler is None:
            raise SchemaError(f"no fold rule for event kind {event.kind}")
        handler(event.payload)
        self.last_seq = event.seq

    def _apply_plan_created(self, p: dict) -> None:
        plan = ExperimentPlan.from_doc(p["plan"])
        self.plans[plan.id] = plan

    def _apply_participant_enrolled(self, p: dict) -> None:
        self.participants[p["participant"]] = {
            "participant": p["participant"],
            "attributes": p.get("attributes", {}),
            "declared_windows": p.get("declared_windows", []),
            "enrolled_at": p.get("enrolled_at"),
        }

    def _apply_actions_expanded(self, p: dict) -> None:
        for doc in p["actions"]:
            self.actions[doc["id"]] = ScheduledAction.from_doc(doc)
        self.diagnostics.extend(p.get("diagnostics", []))

    def _apply_actions_rescheduled(self, p: dict) -> None:
        at = clock.parse_iso(p["at"])
        for aid, new_due in p.get("moves", []):
            action = self.actions[aid]
            self.actions[aid] = action.with_due(clock.parse_iso(new_due))
        for aid in p.get("dropped", []):
            action = self.actions[aid]
            self.actions[aid] = action.transition(ActionState("Skipped"), at)

    def _apply_replan(self, p: dict) -> None:
        self.replans.append(p)
        action = self.actions[p["action"]]
        requested_at = clock.parse_iso(p["requested_at"])
        if p["op"] == "snooze":
            until = clock.parse_iso(p["until"])
            self.actions[action.id] = action.transition(ActionState("Snoozed", at=until), requested_at)
        elif p["op"] == "move":
            self.actions[action.id] = action.with_due(clock.parse_iso(p["new_time"]))
        elif p["op"] == "skip":
            self.actions[action.id] = action.transition(ActionState("Skipped"), requested_at)
        else:
            raise SchemaError(f"unknown replan op in event: {p['op']}")

    def _apply_state_transition(self, p: dict) -> None:
        action = self.actions[p["action"]]
        if p.get("due_time"):
            action = action.with_due(clock.parse_iso(p["due_time"]))
        to = ActionState.from_doc(p["to"])
        self.actions[action.id] = action.transition(to, clock.parse_iso(p["at"]))

    def _apply_outcome(self, p: dict) -> None:
        action = self.actions[p["action"]]
        settled_at = clock.parse_iso(p["settled_at"])
        if p["outcome"] == "answered":
            new_state = ActionState("Answered", at=settled_at)
        elif p["outcome"] == "expired":
            new_state = ActionState("Expired")
        else:
            raise SchemaError(f"unknown outcome kind: {p['outcome']}")
        self.actions[action.id] = action.transition(new_state, settled_at)
        self.outcomes[action.id] = p

    def _apply_avoid_windows_published(self, p: dict) -> None:
        per = self.avoid_windows.setdefault(p["participant"], {})
        per[p["date"]] = list(p["windows"])

    def _apply_goal_set(self, p: dict) -> None:
        goal = p["goal"]
        self.goals[goal["id"]] = goal

    def _apply_goal_removed(self, p: dict) -> None:
        self.goals.pop(p["goal"], None)

    # -- views -----------------------------------------------------------------

    def participant_actions(self, participant: str) -> list[ScheduledAction]:
        return [a for a in self.actions.values() if a.participant == participant]

    def windows_for(self, participant: str, day_iso: str) -> list[dict]:
        return list(self.avoid_windows.get(participant, {}).get(day_iso, []))

    def to_doc(self) -> dict:
        return {
            "plans": {pid: plan.to_doc() for pid, plan in sorted(self.plans.items())},
            "participants": {pid: doc for pid, doc in sorted(self.participants.items())},
            "actions": {aid: a.to_doc() for aid, a in sorted(self.actions.items())},
            "replans": self.replans,
            "outcomes": {aid: doc for aid, doc in sorted(self.outcomes.items())},
            "avoid_windows": {
                pid: {d: ws for d, ws in sorted(days.items())}
                for pid, days in sorted(self.avoid_windows.items())
            },
            "goals": {gid: doc for gid, doc in sorted(self.goals.items())},
            "diagnostics": self.diagnostics,
        }

    def canonical(self) -> bytes:
        return canonical_bytes(self.to_doc())

    @staticmethod
    def from_doc(doc: dict) -> "ExperimentState":
        state = ExperimentState()
        state.plans = {pid: ExperimentPlan.from_doc(d) for pid, d in doc.get("plans", {}).items()}
        state.participants = dict(doc.get("participants", {}))
        state.actions = {aid: ScheduledAction.from_doc(d) for aid, d in doc.get("actions", {}).items()}
        state.replans = list(doc.get("replans", []))
        state.outcomes = dict(doc.get("outcomes", {}))
        state.avoid_windows = {
            pid: {d: list(ws) for d, ws in days.items()}
            for pid, days in doc.get("avoid_windows", {}).items()
        }
        state.goals = dict(doc.get("goals", {}))
        state.diagnostics = list(doc.get("diagnostics", []))
        return state

    @staticmethod
    def fold(events) -> "ExperimentState":
        state = ExperimentState()
        for event in events:
            state.apply(event)
        return state


def _snake(kind: str) -> str:
    out = []
    for i, ch in enumerate(kind):
        if ch.isupper() and i > 0:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)
