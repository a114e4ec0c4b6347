"""Data-quality alert rules over the stores.

Built-in rules: sensor gap (silence beyond twice the expected cadence),
response drought (no answers despite deliveries), expiry spike (most of a
day's settled questions expired), inconsistent record (an answer naming an
unknown action). Evaluation is a pure function of (stores, now); alert ids
are content-derived from the rule and its anchor, so re-evaluating the
same state yields the same ids and an open alert is never duplicated.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timedelta

from .. import clock
from ..canonical import short_hash
from ..stores import LtmStore, StmStore


@dataclass(frozen=True)
class AlertConfig:
    sensor_cadence_minutes: int = 15
    gap_factor: float = 2.0
    drought_hours: int = 24
    drought_min_notifications: int = 3
    expiry_fraction: float = 0.5
    expiry_min_settled: int = 4


@dataclass(frozen=True)
class Alert:
    id: str
    severity: str  # info | warning | critical
    participant: str | None
    rule: str
    message: str
    raised_at: datetime
    resolved_at: datetime | None = None

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "severity": self.severity,
            "participant": self.participant,
            "rule": self.rule,
            "message": self.message,
            "raised_at": clock.iso(self.raised_at),
            "resolved_at": clock.iso(self.resolved_at) if self.resolved_at else None,
        }


def _alert(rule: str, participant: str | None, anchor: str, severity: str, message: str, now: datetime) -> Alert:
    return Alert(
        id=short_hash(rule, participant or "-", anchor),
        severity=severity,
        participant=participant,
        rule=rule,
        message=message,
        raised_at=now,
    )


def evaluate_alert_rules(
    stm: StmStore, ltm: LtmStore, now: datetime, config: AlertConfig = AlertConfig()
) -> list[Alert]:
    now = clock.ensure_utc(now)
    alerts: list[Alert] = []
    participants = sorted(ev.payload["participant"] for ev in stm.scan(kind="ParticipantEnrolled"))

    known_actions: set[str] = set()
    notified: dict[str, list[datetime]] = {}
    answered: dict[str, list[datetime]] = {}
    settled_today: dict[str, list[str]] = {}
    today = now.date()
    for ev in stm.scan():
        p = ev.payload
        if ev.kind in ("ActionsExpanded",):
            known_actions.update(a["id"] for a in p["actions"])
        elif ev.kind == "StateTransition" and p.get("to", {}).get("kind") == "Notified":
            notified.setdefault(p["participant"], []).append(clock.parse_iso(p["at"]))
        elif ev.kind == "Outcome":
            ts = clock.parse_iso(p["settled_at"])
            if p["outcome"] == "answered":
                answered.setdefault(p["participant"], []).append(ts)
            if ts.date() == today and ts <= now:
                settled_today.setdefault(p["participant"], []).append(p["outcome"])

    window_start = now - timedelta(hours=config.drought_hours)
    gap_limit = timedelta(minutes=config.sensor_cadence_minutes * config.gap_factor)

    for participant in participants:
        geo_times = [
            clock.parse_iso(r.payload["ts"])
            for r in ltm.window(participant, "Sensor", None, now)
            if r.payload.get("kind") == "geo"
        ]
        recent_notifications = [t for t in notified.get(participant, []) if window_start < t <= now]
        active = bool(recent_notifications or [t for t in geo_times if window_start < t])

        if active:
            last_geo = max(geo_times, default=None)
            anchor = clock.iso(last_geo) if last_geo else "never"
            if last_geo is None or now - last_geo > gap_limit:
                alerts.append(
                    _alert(
                        "sensor_gap",
                        participant,
                        anchor,
                        "warning",
                        f"no geo data since {anchor}",
                        now,
                    )
                )

        recent_answers = [t for t in answered.get(participant, []) if window_start < t <= now]
        if len(recent_notifications) >= config.drought_min_notifications and not recent_answers:
            last_answer = max(answered.get(participant, []), default=None)
            anchor = clock.iso(last_answer) if last_answer else "never"
            alerts.append(
                _alert(
                    "response_drought",
                    participant,
                    anchor,
                    "warning",
                    f"{len(recent_notifications)} notifications without an answer in "
                    f"{config.drought_hours}h",
                    now,
                )
            )

        outcomes = settled_today.get(participant, [])
        if len(outcomes) >= config.expiry_min_settled:
            expired = sum(1 for o in outcomes if o == "expired")
            if expired / len(outcomes) > config.expiry_fraction:
                alerts.append(
                    _alert(
                        "expiry_spike",
                        participant,
                        clock.iso_date(today),
                        "warning",
                        f"{expired}/{len(outcomes)} questions expired today",
                        now,
                    )
                )

    for rec in ltm.scan(kind="Answer"):
        action = rec.payload.get("action")
        if action and action not in known_actions:
            alerts.append(
                _alert(
                    "inconsistent_record",
                    rec.participant,
                    action,
                    "critical",
                    f"answer references unknown action {action}",
                    now,
                )
            )
    return alerts


class AlertBook:
    """Open/resolved tracking over successive evaluations."""

    def __init__(self) -> None:
        self._alerts: dict[str, Alert] = {}

    def update(self, current: list[Alert], now: datetime) -> list[Alert]:
        now = clock.ensure_utc(now)
        current_ids = {a.id for a in current}
        for alert in current:
            existing = self._alerts.get(alert.id)
            if existing is None or existing.resolved_at is not None:
                self._alerts[alert.id] = alert
        for aid, alert in self._alerts.items():
            if aid not in current_ids and alert.resolved_at is None:
                self._alerts[aid] = replace(alert, resolved_at=now)
        return self.all()

    def all(self) -> list[Alert]:
        return sorted(self._alerts.values(), key=lambda a: (a.raised_at, a.id))

    def open(self) -> list[Alert]:
        return [a for a in self.all() if a.resolved_at is None]
