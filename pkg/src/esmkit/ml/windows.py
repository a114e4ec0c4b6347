"""Predicted busy windows from a trained model.

The day is cut into fixed slots; the model scores each slot's midpoint
features, qualifying slots (probability >= tau) merge into windows whose
confidence is the mean slot probability.
"""

from __future__ import annotations

import math
from datetime import date, timedelta

from .. import clock
from ..planning import AvoidWindow
from ..stores import LtmStore, StmStore
from .features import FeatureExtractor, FeatureSchema

SLOT_MINUTES = 30
TAU = 0.6


def derive_avoid_windows(
    model,
    ltm: LtmStore,
    participant: str,
    day: date,
    *,
    stm: StmStore | None = None,
    slot_minutes: int = SLOT_MINUTES,
    tau: float = TAU,
    extractor: FeatureExtractor | None = None,
) -> list[AvoidWindow]:
    schema_doc = getattr(model, "feature_schema", None)
    schema = FeatureSchema.from_doc(schema_doc) if schema_doc else FeatureSchema()
    extractor = extractor or FeatureExtractor(ltm, stm, schema)

    import numpy as np

    slot_starts = list(range(0, 1440, slot_minutes))
    vectors = [
        extractor.vector(
            participant, clock.at_minute(day, 0) + timedelta(minutes=start + slot_minutes / 2)
        )
        for start in slot_starts
    ]
    probas = [float(p) for p in model.predict_proba(np.vstack(vectors))]

    windows: list[AvoidWindow] = []
    run: list[tuple[int, float]] = []
    for start, proba in zip(slot_starts, probas):
        if proba >= tau:
            run.append((start, proba))
            continue
        if run:
            windows.append(_merge(participant, day, run, slot_minutes))
            run = []
    if run:
        windows.append(_merge(participant, day, run, slot_minutes))
    return windows


def _merge(participant: str, day: date, run: list[tuple[int, float]], slot_minutes: int) -> AvoidWindow:
    start = run[0][0]
    end = run[-1][0] + slot_minutes
    confidence = math.fsum(p for _, p in run) / len(run)
    return AvoidWindow(
        participant=participant,
        day=day,
        start_minute=start,
        end_minute=min(end, 1440),
        source="predicted",
        confidence=confidence,
    )
