"""Plan, action and replan value types plus their document forms."""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date, datetime, timedelta

from .. import clock
from ..canonical import short_hash
from ..errors import IllegalTransitionError, SchemaError

QUESTION_KINDS = ("what", "where", "mood", "objects", "who", "custom")
SENSOR_KINDS = ("geo", "accelerometer", "app_usage")


@dataclass(frozen=True)
class Recurrence:
    """Either every N minutes (anchored at each day's midnight) or fixed
    daily clock times."""

    every_minutes: int | None = None
    daily_times: tuple[int, ...] | None = None

    def __post_init__(self):
        if (self.every_minutes is None) == (self.daily_times is None):
            raise SchemaError("recurrence needs exactly one of every_minutes or daily times")
        if self.every_minutes is not None and self.every_minutes < 1:
            raise SchemaError("recurrence interval must be >= 1 minute")
        if self.daily_times is not None:
            for t in self.daily_times:
                if not 0 <= t < 1440:
                    raise SchemaError(f"daily time out of range: {t}")

    def occurrences(self) -> list[int]:
        """Minutes-of-day this template fires, one day's worth."""
        if self.every_minutes is not None:
            return list(range(0, 1440, self.every_minutes))
        return sorted(self.daily_times or ())

    def to_doc(self) -> dict:
        if self.every_minutes is not None:
            return {"every_minutes": self.every_minutes}
        return {"times": [clock.hhmm(t) for t in self.daily_times or ()]}

    @staticmethod
    def from_doc(doc: dict) -> "Recurrence":
        if "every_minutes" in doc:
            return Recurrence(every_minutes=int(doc["every_minutes"]))
        return Recurrence(daily_times=tuple(clock.parse_hhmm(t) for t in doc["times"]))


@dataclass(frozen=True)
class TaskTemplate:
    id: str
    kind: str  # question | sensor
    recurrence: Recurrence
    validity_minutes: int
    priority: int = 0
    question_kind: str | None = None
    sensor_kind: str | None = None

    def __post_init__(self):
        if self.kind not in ("question", "sensor"):
            raise SchemaError(f"unknown template kind: {self.kind}")
        if self.validity_minutes <= 0:
            raise SchemaError("validity window must be positive")
        if self.kind == "question":
            if self.question_kind not in QUESTION_KINDS:
                raise SchemaError(f"unknown question kind: {self.question_kind}")
        elif self.sensor_kind not in SENSOR_KINDS:
            raise SchemaError(f"unknown sensor kind: {self.sensor_kind}")

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "kind": self.kind,
            "recurrence": self.recurrence.to_doc(),
            "validity_minutes": self.validity_minutes,
            "priority": self.priority,
        }
        if self.question_kind is not None:
            doc["question_kind"] = self.question_kind
        if self.sensor_kind is not None:
            doc["sensor_kind"] = self.sensor_kind
        return doc

    @staticmethod
    def from_doc(doc: dict) -> "TaskTemplate":
        return TaskTemplate(
            id=doc["id"],
            kind=doc["kind"],
            recurrence=Recurrence.from_doc(doc["recurrence"]),
            validity_minutes=int(doc["validity_minutes"]),
            priority=int(doc.get("priority", 0)),
            question_kind=doc.get("question_kind"),
            sensor_kind=doc.get("sensor_kind"),
        )


@dataclass(frozen=True)
class QuietHours:
    """Daily do-not-disturb interval [start, end) in minutes; may wrap
    midnight. start == end means no quiet hours; (0, 1440) covers the day."""

    start: int = 0
    end: int = 0

    def covers(self, minute: int) -> bool:
        if self.start == self.end:
            return False
        if self.start < self.end:
            return self.start <= minute < self.end
        return minute >= self.start or minute < self.end

    def covers_whole_day(self) -> bool:
        return (self.start, self.end) == (0, 1440)

    def to_doc(self) -> list[str]:
        return [clock.hhmm(self.start), clock.hhmm(self.end)]

    @staticmethod
    def from_doc(doc) -> "QuietHours":
        if not doc:
            return QuietHours()
        return QuietHours(start=clock.parse_hhmm(doc[0]), end=clock.parse_hhmm(doc[1]))


@dataclass(frozen=True)
class PlanConstraints:
    min_gap_minutes: int = 0
    quiet_hours: QuietHours = QuietHours()
    max_daily_questions: int = 1000

    def __post_init__(self):
        if self.min_gap_minutes < 0:
            raise SchemaError("min gap must be >= 0")
        if self.max_daily_questions < 0:
            raise SchemaError("max daily questions must be >= 0")

    def to_doc(self) -> dict:
        return {
            "min_gap_minutes": self.min_gap_minutes,
            "quiet_hours": self.quiet_hours.to_doc(),
            "max_daily_questions": self.max_daily_questions,
        }

    @staticmethod
    def from_doc(doc: dict) -> "PlanConstraints":
        return PlanConstraints(
            min_gap_minutes=int(doc.get("min_gap_minutes", 0)),
            quiet_hours=QuietHours.from_doc(doc.get("quiet_hours")),
            max_daily_questions=int(doc.get("max_daily_questions", 1000)),
        )


@dataclass(frozen=True)
class ExperimentPlan:
    id: str
    researcher: str
    start_date: date
    end_date: date  # exclusive
    templates: tuple[TaskTemplate, ...]
    constraints: PlanConstraints = PlanConstraints()

    def __post_init__(self):
        if self.start_date >= self.end_date:
            raise SchemaError("plan start must precede end")
        seen = set()
        for t in self.templates:
            if t.id in seen:
                raise SchemaError(f"duplicate template id: {t.id}")
            seen.add(t.id)

    def days(self) -> list[date]:
        out = []
        d = self.start_date
        while d < self.end_date:
            out.append(d)
            d += timedelta(days=1)
        return out

    def contains(self, ts: datetime) -> bool:
        return clock.at_minute(self.start_date, 0) <= ts < clock.at_minute(self.end_date, 0)

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "researcher": self.researcher,
            "start_date": clock.iso_date(self.start_date),
            "end_date": clock.iso_date(self.end_date),
            "templates": [t.to_doc() for t in self.templates],
            "constraints": self.constraints.to_doc(),
        }

    @staticmethod
    def from_doc(doc: dict) -> "ExperimentPlan":
        return ExperimentPlan(
            id=doc["id"],
            researcher=doc["researcher"],
            start_date=clock.parse_iso_date(doc["start_date"]),
            end_date=clock.parse_iso_date(doc["end_date"]),
            templates=tuple(TaskTemplate.from_doc(t) for t in doc["templates"]),
            constraints=PlanConstraints.from_doc(doc.get("constraints", {})),
        )


# -- action lifecycle ---------------------------------------------------------

TERMINAL_STATES = frozenset({"Answered", "Expired", "Skipped"})

# Notified -> Snoozed is deliberate: participants react to a delivered
# notification by pushing it back, and those reactions feed scheduler training.
LEGAL_TRANSITIONS: dict[str, frozenset[str]] = {
    "Pending": frozenset({"Notified", "Snoozed", "Skipped"}),
    "Notified": frozenset({"Answered", "Expired", "Snoozed"}),
    "Snoozed": frozenset({"Pending"}),
    "Answered": frozenset(),
    "Expired": frozenset(),
    "Skipped": frozenset(),
}


@dataclass(frozen=True)
class ActionState:
    kind: str
    at: datetime | None = None  # Notified/Answered: when; Snoozed: until

    def __post_init__(self):
        if self.kind not in LEGAL_TRANSITIONS:
            raise SchemaError(f"unknown action state: {self.kind}")

    @property
    def terminal(self) -> bool:
        return self.kind in TERMINAL_STATES

    def to_doc(self) -> dict:
        doc: dict = {"kind": self.kind}
        if self.at is not None:
            doc["at"] = clock.iso(self.at)
        return doc

    @staticmethod
    def from_doc(doc: dict) -> "ActionState":
        at = doc.get("at")
        return ActionState(kind=doc["kind"], at=clock.parse_iso(at) if at else None)


PENDING = ActionState("Pending")


@dataclass(frozen=True)
class ScheduledAction:
    id: str
    plan_id: str
    participant: str
    template_id: str
    kind: str  # question | sensor
    due_time: datetime
    validity_minutes: int
    priority: int = 0
    question_kind: str | None = None
    sensor_kind: str | None = None
    state: ActionState = PENDING
    history: tuple[tuple[str, str], ...] = ()  # (state kind, transition time iso)

    @property
    def expiry_time(self) -> datetime:
        return self.due_time + timedelta(minutes=self.validity_minutes)

    def transition(self, new_state: ActionState, at: datetime) -> "ScheduledAction":
        allowed = LEGAL_TRANSITIONS[self.state.kind]
        if new_state.kind not in allowed:
            raise IllegalTransitionError(
                f"illegal transition {self.state.kind} -> {new_state.kind}",
                action=self.id,
                from_state=self.state.kind,
                to_state=new_state.kind,
            )
        at = clock.ensure_utc(at)
        if self.history and clock.parse_iso(self.history[-1][1]) > at:
            raise IllegalTransitionError(
                "history timestamps must be nondecreasing", action=self.id
            )
        return replace(self, state=new_state, history=self.history + ((new_state.kind, clock.iso(at)),))

    def with_due(self, due_time: datetime) -> "ScheduledAction":
        return replace(self, due_time=clock.ensure_utc(due_time))

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "plan": self.plan_id,
            "participant": self.participant,
            "template": self.template_id,
            "kind": self.kind,
            "due_time": clock.iso(self.due_time),
            "validity_minutes": self.validity_minutes,
            "priority": self.priority,
            "state": self.state.to_doc(),
            "history": [list(h) for h in self.history],
        }
        if self.question_kind is not None:
            doc["question_kind"] = self.question_kind
        if self.sensor_kind is not None:
            doc["sensor_kind"] = self.sensor_kind
        return doc

    @staticmethod
    def from_doc(doc: dict) -> "ScheduledAction":
        return ScheduledAction(
            id=doc["id"],
            plan_id=doc["plan"],
            participant=doc["participant"],
            template_id=doc["template"],
            kind=doc["kind"],
            due_time=clock.parse_iso(doc["due_time"]),
            validity_minutes=int(doc["validity_minutes"]),
            priority=int(doc.get("priority", 0)),
            question_kind=doc.get("question_kind"),
            sensor_kind=doc.get("sensor_kind"),
            state=ActionState.from_doc(doc["state"]),
            history=tuple((h[0], h[1]) for h in doc.get("history", [])),
        )


def action_id(plan_id: str, participant: str, template_id: str, nominal_due: datetime) -> str:
    """Deterministic id; displacement keeps the nominal occurrence id."""
    return short_hash(plan_id, participant, template_id, clock.iso(nominal_due))


@dataclass(frozen=True)
class ReplanRequest:
    action_id: str
    participant: str
    op: str  # snooze | move | skip
    requested_at: datetime
    snooze_minutes: int | None = None
    new_time: datetime | None = None

    def __post_init__(self):
        if self.op not in ("snooze", "move", "skip"):
            raise SchemaError(f"unknown replan op: {self.op}")
        if self.op == "snooze":
            if self.snooze_minutes is None or not 0 < self.snooze_minutes <= 24 * 60:
                raise SchemaError("snooze duration must be in (0, 24h]")
        if self.op == "move" and self.new_time is None:
            raise SchemaError("move requires a new time")

    def to_doc(self) -> dict:
        doc = {
            "action": self.action_id,
            "participant": self.participant,
            "op": self.op,
            "requested_at": clock.iso(self.requested_at),
        }
        if self.snooze_minutes is not None:
            doc["snooze_minutes"] = self.snooze_minutes
        if self.new_time is not None:
            doc["new_time"] = clock.iso(self.new_time)
        return doc

    @staticmethod
    def from_doc(doc: dict) -> "ReplanRequest":
        return ReplanRequest(
            action_id=doc["action"],
            participant=doc["participant"],
            op=doc["op"],
            requested_at=clock.parse_iso(doc["requested_at"]),
            snooze_minutes=doc.get("snooze_minutes"),
            new_time=clock.parse_iso(doc["new_time"]) if doc.get("new_time") else None,
        )


@dataclass(frozen=True)
class AvoidWindow:
    """A predicted or declared busy interval [start, end) on one day."""

    participant: str
    day: date
    start_minute: int
    end_minute: int
    source: str = "predicted"  # predicted | declared
    confidence: float = 1.0

    def __post_init__(self):
        if not self.start_minute < self.end_minute:
            raise SchemaError("avoid window start must precede end")
        if not 0 <= self.start_minute < 1440 or not 0 < self.end_minute <= 1440:
            raise SchemaError("avoid window outside the day")
        if self.source not in ("predicted", "declared"):
            raise SchemaError(f"unknown avoid window source: {self.source}")
        if not 0.0 <= self.confidence <= 1.0:
            raise SchemaError("confidence must be within [0, 1]")

    def covers(self, minute: int) -> bool:
        return self.start_minute <= minute < self.end_minute

    def to_doc(self) -> dict:
        return {
            "participant": self.participant,
            "date": clock.iso_date(self.day),
            "start": clock.hhmm(self.start_minute),
            "end": clock.hhmm(self.end_minute),
            "source": self.source,
            "confidence": self.confidence,
        }

    @staticmethod
    def from_doc(doc: dict) -> "AvoidWindow":
        return AvoidWindow(
            participant=doc["participant"],
            day=clock.parse_iso_date(doc["date"]),
            start_minute=clock.parse_hhmm(doc["start"]),
            end_minute=clock.parse_hhmm(doc["end"]),
            source=doc.get("source", "predicted"),
            confidence=float(doc.get("confidence", 1.0)),
        )
