"""Binary busy-label encoding of diary activities."""

from __future__ import annotations

from ..vocab import DEFAULT_VOCABULARY, Vocabulary


def encode_label(activity: str, vocab: Vocabulary = DEFAULT_VOCABULARY) -> int:
    """1 for study activities (alone, in a group, or attending a lecture),
    0 for everything else in the vocabulary."""
    vocab.require_activity(activity)
    return 1 if activity in vocab.busy_activities else 0
