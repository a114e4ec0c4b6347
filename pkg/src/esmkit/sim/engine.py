"""Simulated experiment runs driven through the service facade.

The simulator never touches stores or schedule state directly: it enrolls,
receives tasks, answers, snoozes and uploads sensors through the same
entry points the HTTP API calls, so an end-to-end run exercises the real
system. Everything advances on a simulated minute clock; there is no
wall-clock dependence anywhere on this path.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from pathlib import Path

import numpy as np

from .. import clock
from ..errors import ConflictError
from ..ml import FeatureExtractor, LabeledExample, encode_label
from ..ml.features import ClusterSpec, FeatureSchema
from ..service.config import ApiConfig
from ..service.core import ExperimentService
from ..stores import StmEvent
from ..vocab import DEFAULT_VOCABULARY
from .cohort import BehaviorProfile, activity_at, location_at

SNOOZE_MINUTES = 30
GEO_CADENCE_MINUTES = 15

QUESTION_TIMES = ["08:30", "10:00", "11:30", "13:00", "14:30", "16:00", "17:30", "19:00", "20:30"]


def default_plan_doc(term_start: date, days: int, *, plan_id: str = "plan-term") -> dict:
    return {
        "id": plan_id,
        "researcher": "r1",
        "start_date": clock.iso_date(term_start),
        "end_date": clock.iso_date(term_start + timedelta(days=days)),
        "templates": [
            {
                "id": "q-diary",
                "kind": "question",
                "question_kind": "what",
                "recurrence": {"times": QUESTION_TIMES},
                "validity_minutes": 60,
                "priority": 1,
            }
        ],
        "constraints": {
            "min_gap_minutes": 30,
            "quiet_hours": ["23:00", "07:30"],
            "max_daily_questions": 12,
        },
    }


@dataclass(frozen=True)
class SimEvent:
    time: datetime
    participant: str
    kind: str  # ActivityChange | Notified | Answered | Snoozed | Ignored | SensorEmitted
    payload: dict = field(default_factory=dict)


_ANSWER_CONTENT = {
    "lecture": {"objects": ["notes"], "who": ["classmate"]},
    "study_group": {"objects": ["book", "laptop"], "who": ["classmate"]},
    "study_alone": {"objects": ["book", "laptop"], "who": []},
    "meal": {"objects": ["coffee"], "who": ["friend"]},
}


class Simulation:
    """One cohort advancing minute by minute against a live service."""

    def __init__(
        self,
        profiles: list[BehaviorProfile],
        service: ExperimentService,
        *,
        seed: int,
        policy: str = "fixed",
        train_after_days: int = 14,
        family: str = "random_forest",
        train_params: dict | None = None,
    ):
        if policy not in ("fixed", "adaptive"):
            raise ValueError(f"unknown policy: {policy}")
        self.profiles = sorted(profiles, key=lambda p: p.participant)
        self.service = service
        self.policy = policy
        self.seed = seed
        self.train_after_days = train_after_days
        self.family = family
        self.train_params = train_params or {}
        self.events: list[SimEvent] = []
        self._rng = {
            p.participant: np.random.default_rng([seed, i]) for i, p in enumerate(self.profiles)
        }
        self._tokens = {
            p.participant: service.config.participant_token(p.participant) for p in self.profiles
        }
        self._last_activity: dict[str, str | None] = {p.participant: None for p in self.profiles}
        self._pending_answers: list[tuple[datetime, int, str, str]] = []
        self._counter = 0
        self.start: datetime | None = None

    # -- behaviors ---------------------------------------------------------------

    def _emit(self, time: datetime, participant: str, kind: str, **payload) -> None:
        self.events.append(SimEvent(time=time, participant=participant, kind=kind, payload=payload))

    def _is_busy(self, profile: BehaviorProfile, ts: datetime) -> bool:
        return activity_at(profile, ts) in self.service.vocab.busy_activities

    def _answers_doc(self, profile: BehaviorProfile, ts: datetime) -> dict:
        activity = activity_at(profile, ts)
        where, _, _ = location_at(profile, ts)
        rng = self._rng[profile.participant]
        mood = DEFAULT_VOCABULARY.moods[
            int(rng.choice(len(profile.mood_weights), p=profile.mood_weights))
        ]
        extra = _ANSWER_CONTENT.get(activity, {"objects": [], "who": []})
        doc: dict = {"what": activity, "where": where, "mood": mood}
        if extra["objects"]:
            doc["objects"] = list(extra["objects"])
        if extra["who"]:
            doc["who"] = list(extra["who"])
        return doc

    def _decide_question(self, profile: BehaviorProfile, action_id: str, now: datetime) -> None:
        rng = self._rng[profile.participant]
        busy = self._is_busy(profile, now)
        answer_prob = profile.busy_answer_prob if busy else profile.base_answer_prob
        if rng.random() < answer_prob:
            delay = int(rng.geometric(profile.delay_p))
            self._counter += 1
            heapq.heappush(
                self._pending_answers,
                (now + delay * clock.MINUTE, self._counter, profile.participant, action_id),
            )
            return
        if busy and rng.random() < profile.snooze_propensity:
            self.service.replan(
                {"action": action_id, "op": "snooze", "snooze_minutes": SNOOZE_MINUTES},
                token=self._tokens[profile.participant],
                now=now,
            )
            self._emit(now, profile.participant, "Snoozed", action=action_id)
            return
        self._emit(now, profile.participant, "Ignored", action=action_id)

    def _submit_answer(self, profile: BehaviorProfile, action_id: str, now: datetime) -> None:
        doc = {"action": action_id, "answers": self._answers_doc(profile, now)}
        try:
            self.service.submit_answers(doc, token=self._tokens[profile.participant], now=now)
        except ConflictError:
            self._emit(now, profile.participant, "AnswerRejected", action=action_id)
            return
        self._emit(now, profile.participant, "Answered", action=action_id)

    def _emit_geo(self, profile: BehaviorProfile, now: datetime) -> None:
        _, lat, lon = location_at(profile, now)
        self.service.submit_sensors(
            {
                "participant": profile.participant,
                "readings": [
                    {"kind": "geo", "ts": clock.iso(now), "values": {"lat": lat, "lon": lon}}
                ],
            },
            token=self._tokens[profile.participant],
            now=now,
        )
        self._emit(now, profile.participant, "SensorEmitted", lat=lat, lon=lon)

    # -- the clock loop ----------------------------------------------------------

    def step(self, now: datetime) -> list[SimEvent]:
        """Advance one simulated minute; returns the events it produced."""
        if self.start is None:
            self.start = now
        before = len(self.events)
        minute = clock.minute_of_day(now)

        if (
            self.policy == "adaptive"
            and now == self.start + timedelta(days=self.train_after_days)
        ):
            self.service.train(
                {"family": self.family, "params": self.train_params, "seed": self.seed},
                token=self.service.config.researcher_token,
                now=now,
            )
            self._emit(now, "-", "ModelTrained", family=self.family)

        self.service.tick(now)

        while self._pending_answers and self._pending_answers[0][0] <= now:
            _, _, participant, action_id = heapq.heappop(self._pending_answers)
            profile = next(p for p in self.profiles if p.participant == participant)
            self._submit_answer(profile, action_id, now)

        for profile in self.profiles:
            participant = profile.participant
            activity = activity_at(profile, now)
            if activity != self._last_activity[participant]:
                self._emit(now, participant, "ActivityChange", activity=activity)
                self._last_activity[participant] = activity

            if minute % GEO_CADENCE_MINUTES == 0:
                self._emit_geo(profile, now)

            next_due = self.service.next_due(participant)
            if next_due is not None and next_due <= now:
                for action_doc in self.service.get_tasks(
                    participant, token=self._tokens[participant], now=now
                ):
                    busy = self._is_busy(profile, now)
                    self._emit(
                        now,
                        participant,
                        "Notified",
                        action=action_doc["id"],
                        action_kind=action_doc["kind"],
                        busy=busy,
                    )
                    if action_doc["kind"] == "question":
                        self._decide_question(profile, action_doc["id"], now)
                    else:
                        _, lat, lon = location_at(profile, now)
                        self.service.submit_sensors(
                            {
                                "participant": participant,
                                "action": action_doc["id"],
                                "readings": [
                                    {
                                        "kind": action_doc.get("sensor_kind", "geo"),
                                        "ts": clock.iso(now),
                                        "values": {"lat": lat, "lon": lon},
                                    }
                                ],
                            },
                            token=self._tokens[participant],
                            now=now,
                        )
        return self.events[before:]


@dataclass
class RunResult:
    data_dir: Path
    policy: str
    seed: int
    term_start: date
    days: int
    train_after_days: int
    profiles: list[BehaviorProfile]
    sim_events: list[SimEvent]
    stm_events: list[StmEvent]
    dataset: list[LabeledExample]
    busy_vocabulary: frozenset[str]

    def sim_events_of(self, kind: str) -> list[SimEvent]:
        return [e for e in self.sim_events if e.kind == kind]


def run_experiment(
    profiles: list[BehaviorProfile],
    plan_doc: dict,
    *,
    policy: str,
    days: int,
    seed: int,
    data_dir: str | Path,
    train_after_days: int = 14,
    family: str = "random_forest",
    train_params: dict | None = None,
    campus: tuple[float, float] = (46.07, 11.12),
) -> RunResult:
    """Enroll a cohort, run the plan for `days`, export the labeled dataset."""
    data_dir = Path(data_dir)
    schema = FeatureSchema(clusters=(ClusterSpec("campus", campus[0], campus[1]),))
    config = ApiConfig(data_dir=data_dir, fsync=False, feature_schema=schema)
    service = ExperimentService(config)
    term_start = clock.parse_iso_date(plan_doc["start_date"])
    t0 = clock.at_minute(term_start, 0)

    try:
        for profile in sorted(profiles, key=lambda p: p.participant):
            service.enroll_participant(
                {"participant": profile.participant, "attributes": profile.attributes()},
                token=config.researcher_token,
                now=t0,
            )
        service.create_plan(plan_doc, token=config.researcher_token, now=t0)

        sim = Simulation(
            profiles,
            service,
            seed=seed,
            policy=policy,
            train_after_days=train_after_days,
            family=family,
            train_params=train_params,
        )
        total_minutes = days * 1440
        for m in range(total_minutes):
            sim.step(t0 + m * clock.MINUTE)
        # settle anything still pending at the end
        sim.service.tick(t0 + total_minutes * clock.MINUTE)

        dataset = _export_dataset(service, sim, profiles)
        _write_exports(data_dir, dataset, profiles, plan_doc, policy, seed)

        return RunResult(
            data_dir=data_dir,
            policy=policy,
            seed=seed,
            term_start=term_start,
            days=days,
            train_after_days=train_after_days,
            profiles=list(profiles),
            sim_events=sim.events,
            stm_events=service.stm.events(),
            dataset=dataset,
            busy_vocabulary=service.vocab.busy_activities,
        )
    finally:
        service.close()


def _export_dataset(
    service: ExperimentService, sim: Simulation, profiles: list[BehaviorProfile]
) -> list[LabeledExample]:
    """(features, label) pairs at every question notification, labeled by
    ground-truth activity at notification time."""
    by_id = {p.participant: p for p in profiles}
    extractor = FeatureExtractor(service.ltm, service.stm, service.schema)
    examples = []
    for event in sim.events:
        if event.kind != "Notified" or event.payload.get("action_kind") != "question":
            continue
        profile = by_id[event.participant]
        label = encode_label(activity_at(profile, event.time), service.vocab)
        examples.append(
            LabeledExample(
                features=extractor.vector(event.participant, event.time),
                label=label,
                participant=event.participant,
                at=event.time,
            )
        )
    return examples


def _write_exports(
    data_dir: Path,
    dataset: list[LabeledExample],
    profiles: list[BehaviorProfile],
    plan_doc: dict,
    policy: str,
    seed: int,
) -> None:
    with open(data_dir / "dataset.jsonl", "w") as fh:
        for ex in dataset:
            fh.write(
                json.dumps(
                    {
                        "participant": ex.participant,
                        "at": clock.iso(ex.at),
                        "label": ex.label,
                        "features": [float(v) for v in ex.features],
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    (data_dir / "run.json").write_text(
        json.dumps(
            {
                "policy": policy,
                "seed": seed,
                "participants": [p.participant for p in profiles],
                "plan": plan_doc,
                "examples": len(dataset),
            },
            indent=1,
            sort_keys=True,
        )
    )


def analyze_run(result: RunResult, eval_start_day: int) -> dict:
    """Delivery and answer metrics over the evaluation phase (day index >=
    eval_start_day), plus ground-truth coverage of published avoid windows."""
    from .cohort import busy_minutes

    phase_start = clock.at_minute(result.term_start, 0) + timedelta(days=eval_start_day)
    by_id = {p.participant: p for p in result.profiles}

    delivered = delivered_busy = answered = 0
    for event in result.sim_events:
        if event.time < phase_start:
            continue
        if event.kind == "Notified" and event.payload.get("action_kind") == "question":
            delivered += 1
            delivered_busy += int(event.payload["busy"])
        elif event.kind == "Answered":
            answered += 1

    covered = total_busy = 0
    for event in result.stm_events:
        if event.kind != "AvoidWindowsPublished":
            continue
        day = clock.parse_iso_date(event.payload["date"])
        day_index = (day - result.term_start).days
        if day_index < eval_start_day or day_index >= result.days:
            continue
        profile = by_id[event.payload["participant"]]
        truth = busy_minutes(profile, day, result.busy_vocabulary)
        total_busy += len(truth)
        window_minutes: set[int] = set()
        for w in event.payload["windows"]:
            window_minutes.update(
                range(clock.parse_hhmm(w["start"]), clock.parse_hhmm(w["end"]))
            )
        covered += len(truth & window_minutes)

    return {
        "delivered": delivered,
        "delivered_busy": delivered_busy,
        "busy_delivery_rate": delivered_busy / delivered if delivered else 0.0,
        "answered": answered,
        "answered_rate": answered / delivered if delivered else 0.0,
        "busy_minute_coverage": covered / total_busy if total_busy else 0.0,
    }
