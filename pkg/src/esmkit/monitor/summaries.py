"""Per-participant progress summaries, comparisons, rankings and goals.

Counts are attributed to days by event time: deliveries by notification
instant, settlements by settlement instant, sensor records by reading
timestamp. Contribution for rankings weighs an answered question as 1 and
a sensor record as 0.01.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta

from .. import clock
from ..errors import SchemaError
from ..stores import LtmStore, StmStore

SENSOR_WEIGHT = 0.01
ON_TRACK_RATIO = 0.9


@dataclass(frozen=True)
class DayCounts:
    day: date
    sent: int = 0
    answered: int = 0
    expired: int = 0
    skipped: int = 0
    sensors: tuple[tuple[str, int], ...] = ()

    def to_doc(self) -> dict:
        return {
            "day": clock.iso_date(self.day),
            "sent": self.sent,
            "answered": self.answered,
            "expired": self.expired,
            "skipped": self.skipped,
            "sensors": dict(self.sensors),
        }


@dataclass(frozen=True)
class ParticipantSummary:
    participant: str
    start: date
    end: date  # exclusive
    days: tuple[DayCounts, ...]
    mean_delay_minutes: float | None
    completion_rate: float

    @property
    def totals(self) -> dict:
        return {
            "sent": sum(d.sent for d in self.days),
            "answered": sum(d.answered for d in self.days),
            "expired": sum(d.expired for d in self.days),
            "skipped": sum(d.skipped for d in self.days),
            "sensors": sum(n for d in self.days for _, n in d.sensors),
        }

    def to_doc(self) -> dict:
        return {
            "participant": self.participant,
            "start": clock.iso_date(self.start),
            "end": clock.iso_date(self.end),
            "days": [d.to_doc() for d in self.days],
            "mean_delay_minutes": self.mean_delay_minutes,
            "completion_rate": self.completion_rate,
            "totals": self.totals,
        }


def _date_range(start: date, end: date) -> list[date]:
    if start >= end:
        raise SchemaError("summary range start must precede end")
    out = []
    d = start
    while d < end:
        out.append(d)
        d += timedelta(days=1)
    return out


def summarize(
    participant: str, stm: StmStore, ltm: LtmStore, start: date, end: date
) -> ParticipantSummary:
    days = _date_range(start, end)
    index = {d: i for i, d in enumerate(days)}
    sent = [0] * len(days)
    answered = [0] * len(days)
    expired = [0] * len(days)
    skipped = [0] * len(days)
    sensors: list[dict[str, int]] = [dict() for _ in days]
    delays: list[float] = []

    for ev in stm.scan(participant=participant):
        p = ev.payload
        if ev.kind == "StateTransition" and p.get("to", {}).get("kind") == "Notified":
            d = clock.parse_iso(p["at"]).date()
            if d in index:
                sent[index[d]] += 1
        elif ev.kind == "Outcome":
            d = clock.parse_iso(p["settled_at"]).date()
            if d not in index:
                continue
            if p["outcome"] == "answered":
                answered[index[d]] += 1
                if p.get("delay_minutes") is not None:
                    delays.append(float(p["delay_minutes"]))
            else:
                expired[index[d]] += 1
        elif ev.kind == "Replan" and p.get("op") == "skip":
            d = clock.parse_iso(p["requested_at"]).date()
            if d in index:
                skipped[index[d]] += 1
        elif ev.kind == "ActionsRescheduled" and p.get("dropped"):
            d = clock.parse_iso(p["at"]).date()
            if d in index:
                skipped[index[d]] += len(p["dropped"])

    since = clock.at_minute(start, 0)
    until = clock.at_minute(end, 0) - timedelta(seconds=1)
    for rec in ltm.window(participant, "Sensor", since, until):
        d = clock.parse_iso(rec.payload["ts"]).date()
        kind = rec.payload.get("kind", "unknown")
        if d in index:
            bucket = sensors[index[d]]
            bucket[kind] = bucket.get(kind, 0) + 1

    total_sent = sum(sent)
    total_answered = sum(answered)
    return ParticipantSummary(
        participant=participant,
        start=start,
        end=end,
        days=tuple(
            DayCounts(
                day=d,
                sent=sent[i],
                answered=answered[i],
                expired=expired[i],
                skipped=skipped[i],
                sensors=tuple(sorted(sensors[i].items())),
            )
            for i, d in enumerate(days)
        ),
        mean_delay_minutes=(math.fsum(delays) / len(delays)) if delays else None,
        completion_rate=(total_answered / total_sent) if total_sent else 0.0,
    )


def compare(
    participants: list[str],
    stm: StmStore,
    ltm: LtmStore,
    start: date,
    end: date,
    metric: str = "answered",
) -> dict[str, list[int]]:
    """Aligned per-day series, one per participant, missing days zero-filled."""
    if metric not in ("answered", "sent", "expired"):
        raise SchemaError(f"unknown comparison metric: {metric}")
    series: dict[str, list[int]] = {}
    for participant in participants:
        summary = summarize(participant, stm, ltm, start, end)
        series[participant] = [getattr(d, metric) for d in summary.days]
    return series


def contribution(summary: ParticipantSummary) -> float:
    totals = summary.totals
    return totals["answered"] + SENSOR_WEIGHT * totals["sensors"]


def rank_participants(
    stm: StmStore,
    ltm: LtmStore,
    start: date,
    end: date,
    *,
    order: str = "most",
    limit: int | None = None,
) -> list[tuple[str, float]]:
    """Participants by contribution (answers plus weighted sensor volume)."""
    if order not in ("most", "least"):
        raise SchemaError(f"unknown rank order: {order}")
    participants = sorted(
        ev.payload["participant"] for ev in stm.scan(kind="ParticipantEnrolled")
    )
    scored = [
        (p, contribution(summarize(p, stm, ltm, start, end))) for p in participants
    ]
    scored.sort(key=lambda item: (-item[1], item[0]) if order == "most" else (item[1], item[0]))
    return scored[:limit] if limit is not None else scored


# -- goals ---------------------------------------------------------------------

GOAL_METRICS = ("answers_per_day", "sensor_coverage", "response_delay")


@dataclass(frozen=True)
class Goal:
    id: str
    participant: str
    metric: str
    target: float
    window_days: int = 7

    def __post_init__(self):
        if self.metric not in GOAL_METRICS:
            raise SchemaError(f"unknown goal metric: {self.metric}")
        if self.target <= 0:
            raise SchemaError("goal target must be positive")
        if self.window_days < 1:
            raise SchemaError("goal window must be at least one day")

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "participant": self.participant,
            "metric": self.metric,
            "target": self.target,
            "window_days": self.window_days,
        }

    @staticmethod
    def from_doc(doc: dict) -> "Goal":
        return Goal(
            id=doc["id"],
            participant=doc["participant"],
            metric=doc["metric"],
            target=float(doc["target"]),
            window_days=int(doc.get("window_days", 7)),
        )


def goal_progress(goal: Goal, summary: ParticipantSummary) -> tuple[float, bool]:
    """Fraction of target achieved in the summarized window, clamped to
    [0, 1], and whether the participant is on track (>= 90% of target)."""
    n_days = len(summary.days)
    if goal.metric == "answers_per_day":
        per_day = summary.totals["answered"] / n_days if n_days else 0.0
        fraction = per_day / goal.target
    elif goal.metric == "sensor_coverage":
        per_day = summary.totals["sensors"] / n_days if n_days else 0.0
        fraction = per_day / goal.target
    else:  # response_delay: lower is better
        delay = summary.mean_delay_minutes
        fraction = 0.0 if delay is None else (goal.target / delay if delay > 0 else 1.0)
    fraction = max(0.0, min(1.0, fraction))
    return fraction, fraction >= ON_TRACK_RATIO
