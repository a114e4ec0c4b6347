"""Long-term store: archived answers, sensor readings and context snapshots.

Record ids are content hashes, so appending the same payload twice is a
no-op. The store keeps small in-memory per-participant time indices so the
scheduler and monitoring can query trailing windows without full scans.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Iterator

from .. import clock
from ..canonical import content_id
from ..errors import SchemaError
from .log import LogStore

LTM_RECORD_KINDS = frozenset({"Answer", "Sensor", "Snapshot"})


@dataclass(frozen=True)
class LtmRecord:
    id: str
    participant: str
    kind: str
    payload: dict
    recorded_at: datetime

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "participant": self.participant,
            "kind": self.kind,
            "payload": self.payload,
            "recorded_at": clock.iso(self.recorded_at),
        }

    @staticmethod
    def from_doc(doc: dict) -> "LtmRecord":
        return LtmRecord(
            id=doc["id"],
            participant=doc["participant"],
            kind=doc["kind"],
            payload=doc["payload"],
            recorded_at=clock.parse_iso(doc["recorded_at"]),
        )


def record_id(participant: str, kind: str, payload: dict) -> str:
    return content_id({"participant": participant, "kind": kind, "payload": payload})


class _TimeIndex:
    """Sorted (timestamp, record) pairs with window queries."""

    def __init__(self) -> None:
        self._ts: list[datetime] = []
        self._records: list[LtmRecord] = []

    def add(self, ts: datetime, record: LtmRecord) -> None:
        pos = bisect.bisect_right(self._ts, ts)
        self._ts.insert(pos, ts)
        self._records.insert(pos, record)

    def window(self, since: datetime | None, until: datetime | None) -> list[LtmRecord]:
        lo = bisect.bisect_left(self._ts, since) if since else 0
        hi = bisect.bisect_right(self._ts, until) if until else len(self._ts)
        return self._records[lo:hi]

    def __len__(self) -> int:
        return len(self._ts)


def _payload_ts(kind: str, payload: dict) -> datetime:
    if kind == "Sensor":
        return clock.parse_iso(payload["ts"])
    if kind == "Answer":
        return clock.parse_iso(payload["answered_at"])
    if kind == "Snapshot":
        return clock.parse_iso(payload["timestamp"])
    raise SchemaError(f"unknown LTM record kind: {kind}")


class LtmStore:
    def __init__(self, path: str | Path, *, fsync: bool = True):
        self.log = LogStore(path, fsync=fsync)
        self._ids: set[str] = set()
        self._records: list[LtmRecord] = []
        self._by_participant: dict[tuple[str, str], _TimeIndex] = {}
        for doc in self.log.iter_docs():
            self._ingest(LtmRecord.from_doc(doc))

    @property
    def recovery(self):
        return self.log.recovery

    def _ingest(self, record: LtmRecord) -> None:
        self._ids.add(record.id)
        self._records.append(record)
        key = (record.participant, record.kind)
        idx = self._by_participant.get(key)
        if idx is None:
            idx = self._by_participant[key] = _TimeIndex()
        idx.add(_payload_ts(record.kind, record.payload), record)

    def append(self, participant: str, kind: str, payload: dict, recorded_at: datetime) -> tuple[str, bool]:
        """Store a record; returns (content id, created). Duplicates are no-ops."""
        if kind not in LTM_RECORD_KINDS:
            raise SchemaError(f"unknown LTM record kind: {kind}")
        rid = record_id(participant, kind, payload)
        if rid in self._ids:
            return rid, False
        record = LtmRecord(
            id=rid,
            participant=participant,
            kind=kind,
            payload=payload,
            recorded_at=clock.ensure_utc(recorded_at),
        )
        self.log.append_doc(record.to_doc())
        self._ingest(record)
        return rid, True

    def scan(
        self,
        *,
        participant: str | None = None,
        kind: str | None = None,
        since: datetime | None = None,
        until: datetime | None = None,
    ) -> Iterator[LtmRecord]:
        """Records in append order, filtered; time filters use payload timestamps."""
        for record in self._records:
            if participant is not None and record.participant != participant:
                continue
            if kind is not None and record.kind != kind:
                continue
            ts = _payload_ts(record.kind, record.payload)
            if since is not None and ts < since:
                continue
            if until is not None and ts > until:
                continue
            yield record

    def window(
        self, participant: str, kind: str, since: datetime | None, until: datetime | None
    ) -> list[LtmRecord]:
        """Time-ordered records for one participant and kind."""
        idx = self._by_participant.get((participant, kind))
        if idx is None:
            return []
        return idx.window(since, until)

    def count(self) -> int:
        return len(self._records)

    def tail(self, start: int) -> list[LtmRecord]:
        """Records from list position `start`; incremental consumers use this."""
        return self._records[start:]

    def close(self) -> None:
        self.log.close()

    def __enter__(self) -> "LtmStore":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()
