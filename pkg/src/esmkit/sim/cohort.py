"""Cohort generation: weekly timetables, response behavior, geography.

Each department has a timetable family; participants inherit their
department's weekly blocks, so a pooled model can learn busy periods from
department, weekday and hour. Background activity outside the timetable is
a fixed clock heuristic: sleep 00:00-07:00, meals 12:30-13:00 and
19:30-20:00, free time otherwise. Timetable blocks win over background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, datetime

from .. import clock
from ..errors import SchemaError

import numpy as np

SLEEP_END = 7 * 60
MEALS = ((12 * 60 + 30, 13 * 60), (19 * 60 + 30, 20 * 60))


@dataclass(frozen=True)
class TimetableBlock:
    weekday: int  # 0 = Monday
    start_minute: int
    end_minute: int
    activity: str

    def covers(self, weekday: int, minute: int) -> bool:
        return self.weekday == weekday and self.start_minute <= minute < self.end_minute


# One timetable family per department, everything on the half-hour grid.
DEPARTMENT_TEMPLATES: dict[int, tuple[TimetableBlock, ...]] = {
    0: tuple(
        [TimetableBlock(d, 8 * 60 + 30, 12 * 60 + 30, "lecture") for d in (0, 2, 4)]
        + [TimetableBlock(d, 16 * 60, 18 * 60, "study_alone") for d in (0, 2, 4)]
        + [TimetableBlock(d, 14 * 60, 18 * 60, "study_group") for d in (1, 3)]
        + [TimetableBlock(5, 10 * 60, 12 * 60 + 30, "study_alone")]
    ),
    1: tuple(
        [TimetableBlock(d, 9 * 60, 12 * 60, "lecture") for d in range(5)]
        + [TimetableBlock(d, 15 * 60, 18 * 60, "study_alone") for d in (0, 2)]
        + [TimetableBlock(d, 19 * 60, 21 * 60, "study_group") for d in (1, 3)]
        + [TimetableBlock(6, 16 * 60, 18 * 60, "study_alone")]
    ),
    2: tuple(
        [TimetableBlock(d, 8 * 60 + 30, 12 * 60 + 30, "lecture") for d in (1, 3)]
        + [TimetableBlock(d, 14 * 60, 16 * 60 + 30, "lecture") for d in (1, 3)]
        + [TimetableBlock(4, 10 * 60, 14 * 60, "study_group")]
        + [TimetableBlock(2, 9 * 60, 12 * 60, "study_alone")]
        + [TimetableBlock(0, 14 * 60, 16 * 60 + 30, "study_alone")]
        + [TimetableBlock(5, 10 * 60, 12 * 60, "study_group")]
    ),
    3: tuple(
        [TimetableBlock(d, 14 * 60, 18 * 60, "lecture") for d in (0, 1, 2, 3)]
        + [TimetableBlock(4, 8 * 60 + 30, 11 * 60 + 30, "study_group")]
        + [TimetableBlock(d, 9 * 60, 11 * 60, "study_alone") for d in (0, 2)]
        + [TimetableBlock(5, 15 * 60, 17 * 60, "study_alone")]
        + [TimetableBlock(6, 14 * 60, 16 * 60, "study_alone")]
    ),
}


@dataclass(frozen=True)
class BehaviorProfile:
    participant: str
    department: int
    gender: int
    timetable: tuple[TimetableBlock, ...]
    base_answer_prob: float
    busy_answer_prob: float
    delay_p: float  # geometric parameter over minutes
    snooze_propensity: float
    home: tuple[float, float]
    campus: tuple[float, float]
    studies_at_home: bool
    mood_weights: tuple[float, ...]

    def __post_init__(self):
        if not self.busy_answer_prob < self.base_answer_prob:
            raise SchemaError("busy answer probability must be below the base probability")
        if not 0 < self.delay_p <= 1:
            raise SchemaError("delay parameter must be in (0, 1]")
        by_day: dict[int, list[TimetableBlock]] = {}
        for block in self.timetable:
            by_day.setdefault(block.weekday, []).append(block)
        for blocks in by_day.values():
            blocks.sort(key=lambda b: b.start_minute)
            for a, b in zip(blocks, blocks[1:]):
                if a.end_minute > b.start_minute:
                    raise SchemaError(
                        f"timetable overlap on weekday {a.weekday}: "
                        f"{clock.hhmm(a.start_minute)} and {clock.hhmm(b.start_minute)}"
                    )

    def attributes(self) -> dict:
        return {"gender": self.gender, "department": self.department}


@dataclass(frozen=True)
class CohortConfig:
    size: int
    term_start: date
    seed: int = 0
    campus: tuple[float, float] = (46.07, 11.12)

    def to_doc(self) -> dict:
        return {
            "size": self.size,
            "term_start": clock.iso_date(self.term_start),
            "seed": self.seed,
            "campus": list(self.campus),
        }

    @staticmethod
    def from_doc(doc: dict) -> "CohortConfig":
        return CohortConfig(
            size=int(doc["size"]),
            term_start=clock.parse_iso_date(doc["term_start"]),
            seed=int(doc.get("seed", 0)),
            campus=tuple(doc.get("campus", (46.07, 11.12))),
        )


def generate_cohort(config: CohortConfig) -> list[BehaviorProfile]:
    """Deterministic under (config, seed); timetables come from the
    department templates, behavior parameters are jittered per participant."""
    rng = np.random.default_rng(config.seed)
    profiles = []
    for i in range(config.size):
        department = i % len(DEPARTMENT_TEMPLATES)
        base = float(rng.uniform(0.75, 0.92))
        busy = float(rng.uniform(0.08, 0.20))
        bearing = float(rng.uniform(0, 2 * math.pi))
        dist_km = float(rng.uniform(1.5, 5.0))
        lat = config.campus[0] + dist_km * math.cos(bearing) / 111.0
        lon = config.campus[1] + dist_km * math.sin(bearing) / (
            111.0 * math.cos(math.radians(config.campus[0]))
        )
        mood_weights = rng.dirichlet(np.ones(7))
        profiles.append(
            BehaviorProfile(
                participant=f"p{i + 1:03d}",
                department=department,
                gender=int(rng.integers(0, 2)),
                timetable=DEPARTMENT_TEMPLATES[department],
                base_answer_prob=base,
                busy_answer_prob=busy,
                delay_p=float(rng.uniform(0.2, 0.45)),
                snooze_propensity=float(rng.uniform(0.3, 0.6)),
                home=(lat, lon),
                campus=config.campus,
                studies_at_home=bool(rng.integers(0, 2)),
                mood_weights=tuple(float(w) for w in mood_weights),
            )
        )
    return profiles


def activity_at(profile: BehaviorProfile, ts: datetime) -> str:
    """Ground-truth activity: timetable block if one covers the instant,
    else the background clock heuristic."""
    weekday = ts.weekday()
    minute = clock.minute_of_day(ts)
    for block in profile.timetable:
        if block.covers(weekday, minute):
            return block.activity
    if minute < SLEEP_END:
        return "sleep"
    for start, end in MEALS:
        if start <= minute < end:
            return "meal"
    return "free_time"


_CAMPUS_OFFSETS = {
    "classroom": (0.0010, 0.0010),
    "library": (-0.0010, 0.0020),
    "canteen": (0.0020, -0.0010),
}


def location_at(profile: BehaviorProfile, ts: datetime) -> tuple[str, float, float]:
    """(vocabulary location, lat, lon) for the ground-truth activity."""
    activity = activity_at(profile, ts)
    if activity == "lecture":
        return _campus_spot(profile, "classroom")
    if activity == "study_group":
        return _campus_spot(profile, "library")
    if activity == "study_alone":
        if profile.studies_at_home:
            return ("home", *profile.home)
        return _campus_spot(profile, "library")
    if activity == "meal" and _near_campus_block(profile, ts):
        return _campus_spot(profile, "canteen")
    return ("home", *profile.home)


def _campus_spot(profile: BehaviorProfile, name: str) -> tuple[str, float, float]:
    dlat, dlon = _CAMPUS_OFFSETS[name]
    return (name, profile.campus[0] + dlat, profile.campus[1] + dlon)


def _near_campus_block(profile: BehaviorProfile, ts: datetime) -> bool:
    weekday = ts.weekday()
    minute = clock.minute_of_day(ts)
    for block in profile.timetable:
        if block.weekday != weekday:
            continue
        if block.start_minute - 90 <= minute < block.end_minute + 90:
            return True
    return False


def busy_minutes(profile: BehaviorProfile, day: date, busy_activities: frozenset[str]) -> set[int]:
    """Ground-truth minutes of `day` spent on busy (study) activities."""
    weekday = day.weekday()
    out: set[int] = set()
    for block in profile.timetable:
        if block.weekday == weekday and block.activity in busy_activities:
            out.update(range(block.start_minute, block.end_minute))
    return out
