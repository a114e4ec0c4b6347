"""Short-term store: strictly ordered operational event stream.

Every mutation the planner or service performs becomes one event; live
schedule state is a fold over the stream, which is what makes replay and
crash recovery exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Iterator

from .. import clock
from ..errors import SchemaError
from .log import LogStore

STM_EVENT_KINDS = frozenset(
    {
        "PlanCreated",
        "ParticipantEnrolled",
        "ActionsExpanded",
        "ActionsRescheduled",
        "Replan",
        "StateTransition",
        "Outcome",
        "AvoidWindowsPublished",
        "GoalSet",
        "GoalRemoved",
    }
)


@dataclass(frozen=True)
class StmEvent:
    seq: int
    kind: str
    payload: dict
    recorded_at: datetime

    def to_doc(self) -> dict:
        return {
            "seq": self.seq,
            "kind": self.kind,
            "payload": self.payload,
            "recorded_at": clock.iso(self.recorded_at),
        }

    @staticmethod
    def from_doc(doc: dict) -> "StmEvent":
        return StmEvent(
            seq=doc["seq"],
            kind=doc["kind"],
            payload=doc["payload"],
            recorded_at=clock.parse_iso(doc["recorded_at"]),
        )


class StmStore:
    """Sequenced event log. Single writer; sequence numbers never repeat."""

    def __init__(self, path: str | Path, *, fsync: bool = True):
        self.log = LogStore(path, fsync=fsync)
        ckpt = self.log.latest_checkpoint()
        self._checkpoint_seq = ckpt[0] if ckpt else 0
        self._checkpoint_state = ckpt[1] if ckpt else None
        self._events: list[StmEvent] = [StmEvent.from_doc(d) for d in self.log.iter_docs()]
        self._last_seq = self._events[-1].seq if self._events else self._checkpoint_seq

    @property
    def recovery(self):
        return self.log.recovery

    @property
    def last_seq(self) -> int:
        return self._last_seq

    @property
    def checkpoint(self) -> tuple[int, Any] | None:
        if self._checkpoint_state is None:
            return None
        return self._checkpoint_seq, self._checkpoint_state

    def append(self, kind: str, payload: dict, recorded_at: datetime) -> StmEvent:
        if kind not in STM_EVENT_KINDS:
            raise SchemaError(f"unknown STM event kind: {kind}")
        event = StmEvent(
            seq=self._last_seq + 1,
            kind=kind,
            payload=payload,
            recorded_at=clock.ensure_utc(recorded_at),
        )
        self.log.append_doc(event.to_doc())
        self._events.append(event)
        self._last_seq = event.seq
        return event

    def scan(
        self,
        *,
        kind: str | None = None,
        participant: str | None = None,
        since: datetime | None = None,
        until: datetime | None = None,
    ) -> Iterator[StmEvent]:
        """Committed events in sequence order, optionally filtered.

        Participant filtering matches the payload's ``participant`` field.
        """
        for ev in self._events:
            if kind is not None and ev.kind != kind:
                continue
            if participant is not None and ev.payload.get("participant") != participant:
                continue
            if since is not None and ev.recorded_at < since:
                continue
            if until is not None and ev.recorded_at > until:
                continue
            yield ev

    def events(self) -> list[StmEvent]:
        return list(self._events)

    def tail(self, start: int) -> list[StmEvent]:
        """Events from list position `start`; incremental consumers use this."""
        return self._events[start:]

    def count(self) -> int:
        return len(self._events)

    def compact(self, up_to_seq: int, state_doc: Any) -> Path:
        """Write a checkpoint covering seq <= up_to_seq and drop those events."""
        if up_to_seq > self._last_seq:
            raise SchemaError(f"cannot compact past last seq {self._last_seq}")
        path = self.log.write_checkpoint(up_to_seq, state_doc)
        tail = [ev for ev in self._events if ev.seq > up_to_seq]
        self.log.rewrite(ev.to_doc() for ev in tail)
        self._events = tail
        self._checkpoint_seq = up_to_seq
        self._checkpoint_state = state_doc
        return path

    def close(self) -> None:
        self.log.close()

    def __enter__(self) -> "StmStore":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()
