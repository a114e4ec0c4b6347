"""Feature extraction from store fixtures."""

from __future__ import annotations

import math

import numpy as np
import pytest

from esmkit import clock
from esmkit.context import DiaryAnswerSet, build_snapshot, snapshot_to_doc
from esmkit.ml import FeatureExtractor, FeatureSchema, extract_features
from esmkit.ml.features import ClusterSpec, haversine_km
from esmkit.stores import LtmStore, StmStore

SCHEMA = FeatureSchema(clusters=(ClusterSpec("campus", 46.07, 11.12),))
TUESDAY_1030 = clock.utc(2026, 1, 6, 10, 30)  # 2026-01-06 is a Tuesday


@pytest.fixture
def stores(tmp_path):
    with LtmStore(tmp_path / "ltm.log", fsync=False) as ltm, StmStore(
        tmp_path / "stm.log", fsync=False
    ) as stm:
        yield ltm, stm


def slot(name: str) -> int:
    return SCHEMA.slots.index(name)


def test_time_slots(stores):
    ltm, stm = stores
    v = extract_features(ltm, "p1", TUESDAY_1030, SCHEMA, stm)
    assert v[slot("hour_sin")] == pytest.approx(math.sin(2 * math.pi * 10.5 / 24))
    assert v[slot("hour_cos")] == pytest.approx(math.cos(2 * math.pi * 10.5 / 24))
    assert v[slot("wd_1")] == 1.0
    assert sum(v[slot(f"wd_{i}")] for i in range(7)) == 1.0


def test_empty_store_yields_neutral_vector(stores):
    ltm, stm = stores
    v = extract_features(ltm, "p1", TUESDAY_1030, SCHEMA, stm)
    assert v[slot("response_rate")] == 0.5
    assert v[slot("mood_index")] == -1.0
    assert v[slot("loc_unknown")] == 1.0
    assert v[slot("companion")] == 0.0
    assert v[slot("gender")] == -1.0 and v[slot("department")] == -1.0
    assert np.all(np.isfinite(v))


def _notify(stm, participant, at):
    stm.append(
        "StateTransition",
        {"participant": participant, "action": f"a{clock.iso(at)}", "to": {"kind": "Notified", "at": clock.iso(at)}, "at": clock.iso(at)},
        at,
    )


def _answer(stm, participant, at):
    stm.append(
        "Outcome",
        {
            "participant": participant,
            "action": f"a{clock.iso(at)}",
            "outcome": "answered",
            "notified_at": clock.iso(at),
            "settled_at": clock.iso(at),
        },
        at,
    )


def test_response_rate_from_fixture_log(stores):
    ltm, stm = stores
    base = TUESDAY_1030 - 30 * clock.MINUTE
    for i in range(4):
        _notify(stm, "p1", base - i * 5 * clock.MINUTE)
    for i in range(3):
        _answer(stm, "p1", base - i * 5 * clock.MINUTE)
    # older-than-window traffic must not count
    _notify(stm, "p1", TUESDAY_1030 - 49 * 60 * clock.MINUTE)
    v = extract_features(ltm, "p1", TUESDAY_1030, SCHEMA, stm)
    assert v[slot("response_rate")] == 0.75


def test_location_from_nearest_reading(stores):
    ltm, stm = stores
    on_campus = {"ts": clock.iso(TUESDAY_1030 - 5 * clock.MINUTE), "kind": "geo", "values": {"lat": 46.0705, "lon": 11.1195}}
    far_away = {"ts": clock.iso(TUESDAY_1030 - 15 * clock.MINUTE), "kind": "geo", "values": {"lat": 46.2, "lon": 11.4}}
    ltm.append("p1", "Sensor", far_away, TUESDAY_1030)
    ltm.append("p1", "Sensor", on_campus, TUESDAY_1030)
    v = extract_features(ltm, "p1", TUESDAY_1030, SCHEMA, stm)
    assert v[slot("loc_campus")] == 1.0
    assert v[slot("loc_other")] == 0.0


def test_location_routine_fallback_same_weekday_hour(stores):
    ltm, stm = stores
    # campus readings on the two previous Tuesdays at 10:xx; nothing current
    for weeks_back in (1, 2):
        ts = TUESDAY_1030 - weeks_back * 7 * clock.DAY
        ltm.append(
            "p1",
            "Sensor",
            {"ts": clock.iso(ts), "kind": "geo", "values": {"lat": 46.0702, "lon": 11.1201}},
            ts,
        )
    v = extract_features(ltm, "p1", TUESDAY_1030, SCHEMA, stm)
    assert v[slot("loc_campus")] == 1.0


def test_mood_and_companion_from_snapshots(stores):
    ltm, stm = stores
    snap = build_snapshot("p1", TUESDAY_1030 - 10 * clock.MINUTE, DiaryAnswerSet(mood="focused", who=("Peter",)))
    ltm.append("p1", "Snapshot", snapshot_to_doc(snap), TUESDAY_1030)
    v = extract_features(ltm, "p1", TUESDAY_1030, SCHEMA, stm)
    assert v[slot("mood_index")] == float(SCHEMA.moods.index("focused"))
    assert v[slot("companion")] == 1.0


def test_static_attributes_from_enrollment(stores):
    ltm, stm = stores
    stm.append(
        "ParticipantEnrolled",
        {"participant": "p1", "attributes": {"gender": 1, "department": 2}},
        TUESDAY_1030,
    )
    v = extract_features(ltm, "p1", TUESDAY_1030, SCHEMA, stm)
    assert v[slot("gender")] == 1.0
    assert v[slot("department")] == 2.0


def test_extraction_deterministic_for_fixed_store(stores):
    ltm, stm = stores
    ltm.append(
        "p1",
        "Sensor",
        {"ts": clock.iso(TUESDAY_1030), "kind": "geo", "values": {"lat": 46.07, "lon": 11.12}},
        TUESDAY_1030,
    )
    extractor = FeatureExtractor(ltm, stm, SCHEMA)
    v1 = extractor.vector("p1", TUESDAY_1030)
    v2 = extractor.vector("p1", TUESDAY_1030)
    v3 = extract_features(ltm, "p1", TUESDAY_1030, SCHEMA, stm)
    assert np.array_equal(v1, v2)
    assert np.array_equal(v1, v3)


def test_schema_doc_round_trip():
    doc = SCHEMA.to_doc()
    assert FeatureSchema.from_doc(doc) == SCHEMA
    assert FeatureSchema.from_doc(doc).slots == SCHEMA.slots


def test_haversine_sanity():
    assert haversine_km(46.07, 11.12, 46.07, 11.12) == 0.0
    # one degree of latitude is about 111 km
    assert haversine_km(46.0, 11.0, 47.0, 11.0) == pytest.approx(111.2, abs=1.0)
