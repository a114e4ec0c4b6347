"""Property tests over random vocabulary-valid answer sets."""

from __future__ import annotations

from hypothesis import given, settings, strategies as st

from esmkit import clock
from esmkit.context import (
    DiaryAnswerSet,
    SensorBatch,
    SensorReading,
    annotate_with_sensors,
    build_snapshot,
    query_dimension,
    snapshot_from_doc,
    snapshot_to_doc,
    validate_graph,
    validate_snapshot,
)
from esmkit.vocab import DEFAULT_VOCABULARY as V

TS = clock.utc(2026, 2, 1, 12, 0)

valid_answers = st.builds(
    DiaryAnswerSet,
    what=st.none() | st.sampled_from(V.activities),
    where=st.none() | st.sampled_from(sorted(V.locations)),
    mood=st.none() | st.sampled_from(V.moods),
    objects=st.lists(st.sampled_from(sorted(V.objects)), max_size=4, unique=True).map(tuple),
    who=st.lists(st.sampled_from(V.persons), max_size=3, unique=True).map(tuple),
)


@settings(max_examples=300, deadline=None)
@given(answers=valid_answers)
def test_valid_answers_build_clean_snapshots(answers):
    snap = build_snapshot("p1", TS, answers)
    assert validate_snapshot(snap, V).ok
    assert validate_graph(snap.graph).ok


@settings(max_examples=300, deadline=None)
@given(answers=valid_answers)
def test_round_trip_equality(answers):
    snap = build_snapshot("p1", TS, answers)
    doc = snapshot_to_doc(snap)
    assert snapshot_from_doc(doc) == snap
    assert snapshot_to_doc(snapshot_from_doc(doc)) == doc


@settings(max_examples=200, deadline=None)
@given(
    answers=valid_answers,
    offsets=st.lists(st.integers(min_value=-14, max_value=14), max_size=5),
)
def test_annotation_keeps_graph_valid(answers, offsets):
    snap = build_snapshot("p1", TS, answers)
    readings = tuple(
        SensorReading.make("geo", TS + off * clock.MINUTE, lat=float(i), lon=float(i))
        for i, off in enumerate(offsets)
    )
    out = annotate_with_sensors(snap, SensorBatch("p1", readings))
    assert validate_graph(out.graph).by_kind("cycle") == []
    assert validate_snapshot(out, V).ok


@settings(max_examples=200, deadline=None)
@given(answers=valid_answers)
def test_query_matches_references(answers):
    snap = build_snapshot("p1", TS, answers)
    assert [e.id for e in query_dimension(snap, "WO")] == list(snap.wo)
    assert [e.id for e in query_dimension(snap, "WU")] == list(snap.wu)
    assert query_dimension(snap, "WI") == snap.wi
