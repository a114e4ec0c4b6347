"""Feature extraction from the stores at a given instant.

Slots, fixed order per schema: hour on the unit circle (sin, cos), weekday
one-hot, location cluster one-hot (configured clusters plus "other" and
"unknown"), companion-present flag, trailing response rate, mood index,
then optional static slots (gender code, department code, personality
traits).

Situational slots resolve in three steps: the sensor reading nearest the
instant within a small window; failing that, the participant's routine at
the same weekday and hour over a lookback period; failing that, the
neutral value (unknown cluster, companion 0). An empty store yields the
all-neutral vector: response rate 0.5, mood index -1, cluster unknown.

Extraction is deterministic for fixed store contents and total.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .. import clock
from ..stores import LtmStore, StmStore
from ..vocab import DEFAULT_VOCABULARY

EARTH_RADIUS_KM = 6371.0


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))


@dataclass(frozen=True)
class ClusterSpec:
    name: str
    lat: float
    lon: float


@dataclass(frozen=True)
class FeatureSchema:
    clusters: tuple[ClusterSpec, ...] = (ClusterSpec("campus", 46.07, 11.12),)
    cluster_radius_km: float = 1.0
    include_static: tuple[str, ...] = ("gender", "department")
    trait_names: tuple[str, ...] = ()
    moods: tuple[str, ...] = DEFAULT_VOCABULARY.moods
    response_window_hours: int = 48
    mood_window_hours: int = 24
    reading_window_minutes: int = 20
    routine_lookback_days: int = 28

    @property
    def cluster_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.clusters) + ("other", "unknown")

    @property
    def slots(self) -> tuple[str, ...]:
        return (
            "hour_sin",
            "hour_cos",
            *(f"wd_{i}" for i in range(7)),
            *(f"loc_{name}" for name in self.cluster_names),
            "companion",
            "response_rate",
            "mood_index",
            *self.include_static,
            *(f"trait_{t}" for t in self.trait_names),
        )

    @property
    def dim(self) -> int:
        return len(self.slots)

    def assign_cluster(self, lat: float, lon: float) -> str:
        best_name, best_dist = "other", None
        for c in self.clusters:
            d = haversine_km(lat, lon, c.lat, c.lon)
            if d <= self.cluster_radius_km and (best_dist is None or d < best_dist):
                best_name, best_dist = c.name, d
        return best_name

    def to_doc(self) -> dict:
        return {
            "clusters": [{"name": c.name, "lat": c.lat, "lon": c.lon} for c in self.clusters],
            "cluster_radius_km": self.cluster_radius_km,
            "include_static": list(self.include_static),
            "trait_names": list(self.trait_names),
            "moods": list(self.moods),
            "response_window_hours": self.response_window_hours,
            "mood_window_hours": self.mood_window_hours,
            "reading_window_minutes": self.reading_window_minutes,
            "routine_lookback_days": self.routine_lookback_days,
        }

    @staticmethod
    def from_doc(doc: dict) -> "FeatureSchema":
        return FeatureSchema(
            clusters=tuple(ClusterSpec(c["name"], c["lat"], c["lon"]) for c in doc["clusters"]),
            cluster_radius_km=doc["cluster_radius_km"],
            include_static=tuple(doc["include_static"]),
            trait_names=tuple(doc["trait_names"]),
            moods=tuple(doc["moods"]),
            response_window_hours=doc["response_window_hours"],
            mood_window_hours=doc["mood_window_hours"],
            reading_window_minutes=doc["reading_window_minutes"],
            routine_lookback_days=doc["routine_lookback_days"],
        )


class _StmView:
    """Incremental per-participant indices over the operational event stream."""

    def __init__(self, stm: StmStore | None):
        self.stm = stm
        self._consumed = 0
        self.notified: dict[str, list[datetime]] = {}
        self.answered: dict[str, list[datetime]] = {}
        self.snoozes: dict[str, list[datetime]] = {}
        self.attributes: dict[str, dict] = {}

    def refresh(self) -> None:
        if self.stm is None:
            return
        events = self.stm.tail(self._consumed)
        self._consumed += len(events)
        for ev in events:
            p = ev.payload
            if ev.kind == "StateTransition" and p.get("to", {}).get("kind") == "Notified":
                bisect.insort(self.notified.setdefault(p["participant"], []), clock.parse_iso(p["at"]))
            elif ev.kind == "Outcome" and p.get("outcome") == "answered":
                bisect.insort(self.answered.setdefault(p["participant"], []), clock.parse_iso(p["settled_at"]))
            elif ev.kind == "Replan" and p.get("op") == "snooze":
                bisect.insort(self.snoozes.setdefault(p["participant"], []), clock.parse_iso(p["requested_at"]))
            elif ev.kind == "ParticipantEnrolled":
                self.attributes[p["participant"]] = p.get("attributes", {})

    @staticmethod
    def _count_window(times: list[datetime], since: datetime, until: datetime) -> int:
        lo = bisect.bisect_right(times, since)
        hi = bisect.bisect_right(times, until)
        return hi - lo


class _GeoView:
    """Geo readings bucketed by (participant, weekday, hour) for routine lookups."""

    def __init__(self, ltm: LtmStore):
        self.ltm = ltm
        self._consumed = 0
        self.buckets: dict[tuple[str, int, int], list[tuple[datetime, float, float]]] = {}

    def refresh(self) -> None:
        records = self.ltm.tail(self._consumed)
        self._consumed += len(records)
        for rec in records:
            if rec.kind != "Sensor" or rec.payload.get("kind") != "geo":
                continue
            ts = clock.parse_iso(rec.payload["ts"])
            values = rec.payload["values"]
            key = (rec.participant, ts.weekday(), ts.hour)
            bucket = self.buckets.setdefault(key, [])
            bisect.insort(bucket, (ts, values["lat"], values["lon"]))

    def routine(self, participant: str, at: datetime, lookback: timedelta) -> list[tuple[float, float]]:
        bucket = self.buckets.get((participant, at.weekday(), at.hour), [])
        since = at - lookback
        return [(lat, lon) for ts, lat, lon in bucket if since <= ts < at]


class FeatureExtractor:
    """Reusable extractor; holds incremental store views for hot paths."""

    def __init__(self, ltm: LtmStore, stm: StmStore | None = None, schema: FeatureSchema | None = None):
        self.ltm = ltm
        self.schema = schema or FeatureSchema()
        self._stm_view = _StmView(stm)
        self._geo_view = _GeoView(ltm)

    def vector(self, participant: str, at: datetime) -> np.ndarray:
        schema = self.schema
        at = clock.ensure_utc(at)
        self._stm_view.refresh()
        self._geo_view.refresh()

        values: list[float] = []
        hour = clock.fractional_hour(at)
        values.append(math.sin(2 * math.pi * hour / 24.0))
        values.append(math.cos(2 * math.pi * hour / 24.0))

        weekday = at.weekday()
        values.extend(1.0 if i == weekday else 0.0 for i in range(7))

        cluster = self._location_cluster(participant, at)
        values.extend(1.0 if name == cluster else 0.0 for name in schema.cluster_names)

        values.append(self._companion(participant, at))
        values.append(self._response_rate(participant, at))
        values.append(float(self._mood_index(participant, at)))

        attrs = self._stm_view.attributes.get(participant, {})
        for name in schema.include_static:
            raw = attrs.get(name, -1)
            values.append(float(raw) if isinstance(raw, (int, float)) else -1.0)
        traits = attrs.get("traits", {}) or {}
        for name in schema.trait_names:
            values.append(float(traits.get(name, -1.0)))

        out = np.array(values, dtype=float)
        if not np.all(np.isfinite(out)):
            raise ValueError(f"non-finite feature for {participant} at {clock.iso(at)}")
        return out

    # -- slot helpers ----------------------------------------------------------

    def _location_cluster(self, participant: str, at: datetime) -> str:
        schema = self.schema
        window = timedelta(minutes=schema.reading_window_minutes)
        readings = [
            r
            for r in self.ltm.window(participant, "Sensor", at - window, at + window)
            if r.payload.get("kind") == "geo"
        ]
        if readings:
            nearest = min(readings, key=lambda r: abs(clock.parse_iso(r.payload["ts"]) - at))
            v = nearest.payload["values"]
            return schema.assign_cluster(v["lat"], v["lon"])
        routine = self._geo_view.routine(participant, at, timedelta(days=schema.routine_lookback_days))
        if routine:
            counts: dict[str, int] = {}
            for lat, lon in routine:
                name = schema.assign_cluster(lat, lon)
                counts[name] = counts.get(name, 0) + 1
            return min(counts, key=lambda name: (-counts[name], name))
        return "unknown"

    def _companion(self, participant: str, at: datetime) -> float:
        schema = self.schema
        window = timedelta(minutes=schema.reading_window_minutes)
        snaps = self.ltm.window(participant, "Snapshot", at - window, at + window)
        if snaps:
            nearest = min(snaps, key=lambda r: abs(clock.parse_iso(r.payload["timestamp"]) - at))
            return 1.0 if nearest.payload.get("wu") else 0.0
        lookback = timedelta(days=schema.routine_lookback_days)
        past = [
            r
            for r in self.ltm.window(participant, "Snapshot", at - lookback, at)
            if clock.parse_iso(r.payload["timestamp"]).weekday() == at.weekday()
            and clock.parse_iso(r.payload["timestamp"]).hour == at.hour
        ]
        if past:
            with_company = sum(1 for r in past if r.payload.get("wu"))
            return 1.0 if with_company * 2 >= len(past) else 0.0
        return 0.0

    def _response_rate(self, participant: str, at: datetime) -> float:
        view = self._stm_view
        if view.stm is None:
            return 0.5
        since = at - timedelta(hours=self.schema.response_window_hours)
        notified = view._count_window(view.notified.get(participant, []), since, at)
        if notified == 0:
            return 0.5
        answered = view._count_window(view.answered.get(participant, []), since, at)
        return min(1.0, answered / notified)

    def _mood_index(self, participant: str, at: datetime) -> int:
        since = at - timedelta(hours=self.schema.mood_window_hours)
        snaps = self.ltm.window(participant, "Snapshot", since, at)
        for rec in reversed(snaps):
            mood = rec.payload.get("wi")
            if mood is not None:
                return self.schema.moods.index(mood) if mood in self.schema.moods else -1
        return -1


def extract_features(
    ltm: LtmStore,
    participant: str,
    at: datetime,
    schema: FeatureSchema | None = None,
    stm: StmStore | None = None,
) -> np.ndarray:
    """One-off extraction; hot paths should hold a FeatureExtractor instead."""
    return FeatureExtractor(ltm, stm, schema).vector(participant, at)
