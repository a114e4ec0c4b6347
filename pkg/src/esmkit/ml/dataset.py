"""Labeled examples: assembly from the stores and chronological splitting.

The production label source is what participants reported: answered
questions labeled by the busy-encoding of their activity answer, plus
accepted snoozes as positive busy signals at the request instant.
Simulated runs can instead export ground-truth labels; both produce the
same LabeledExample rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .. import clock
from ..stores import LtmStore, StmStore
from ..vocab import DEFAULT_VOCABULARY, Vocabulary
from .features import FeatureExtractor, FeatureSchema
from .labels import encode_label


@dataclass(frozen=True)
class LabeledExample:
    features: np.ndarray
    label: int
    participant: str = ""
    at: datetime | None = None

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")


def to_matrix(data) -> tuple[np.ndarray, np.ndarray]:
    """Accepts a list of LabeledExample or an (X, y) pair."""
    if isinstance(data, tuple) and len(data) == 2:
        X, y = data
        return np.atleast_2d(np.asarray(X, dtype=float)), np.asarray(y, dtype=int)
    if not data:
        return np.empty((0, 0)), np.empty((0,), dtype=int)
    X = np.vstack([ex.features for ex in data])
    y = np.array([ex.label for ex in data], dtype=int)
    return X, y


def split_chronological(
    examples: list[LabeledExample], train_fraction: float = 0.7
) -> tuple[list[LabeledExample], list[LabeledExample]]:
    """Per-participant time split (no shuffling across time), pooled."""
    by_participant: dict[str, list[LabeledExample]] = {}
    for ex in examples:
        by_participant.setdefault(ex.participant, []).append(ex)
    train: list[LabeledExample] = []
    test: list[LabeledExample] = []
    for participant in sorted(by_participant):
        rows = sorted(by_participant[participant], key=lambda e: (e.at or clock.utc(1970, 1, 1)))
        cut = int(len(rows) * train_fraction)
        train.extend(rows[:cut])
        test.extend(rows[cut:])
    return train, test


def collect_training_data(
    stm: StmStore,
    ltm: LtmStore,
    schema: FeatureSchema | None = None,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    *,
    include_replans: bool = True,
    extractor: FeatureExtractor | None = None,
    until: datetime | None = None,
) -> list[LabeledExample]:
    """Labeled examples from what the stores know.

    Answered questions contribute (features at notification time, busy
    encoding of the activity answer); snooze replans contribute positive
    examples at the request instant; a pushed-back question is a busy
    signal even without an answer.
    """
    schema = schema or FeatureSchema()
    extractor = extractor or FeatureExtractor(ltm, stm, schema)
    rows: list[tuple[str, datetime, int]] = []

    for record in ltm.scan(kind="Answer", until=until):
        answers = record.payload.get("answers", {})
        what = answers.get("what")
        notified_at = record.payload.get("notified_at")
        if what is None or notified_at is None:
            continue
        rows.append((record.participant, clock.parse_iso(notified_at), encode_label(what, vocab)))

    if include_replans:
        for event in stm.scan(kind="Replan"):
            if event.payload.get("op") != "snooze":
                continue
            at = clock.parse_iso(event.payload["requested_at"])
            if until is not None and at > until:
                continue
            rows.append((event.payload["participant"], at, 1))

    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return [
        LabeledExample(
            features=extractor.vector(participant, at),
            label=label,
            participant=participant,
            at=at,
        )
        for participant, at, label in rows
    ]
