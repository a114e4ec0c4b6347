"""Line-framed append-only log file with torn-write recovery.

Record framing, one record per line:

    <byte-length> <crc32-hex> <record-document>\n

where ``byte-length`` is the UTF-8 length of the document, ``crc32-hex``
is the zero-padded CRC32 of the document bytes, and the document is
canonical JSON (never contains a newline). A torn trailing write fails the
length or checksum test and is truncated away on open.

Checkpoints are written next to the log as ``<store>.<seq>.ckpt`` holding
the full serialized fold state plus the last sequence number they cover.

Exactly one writer may hold a store open (lock file); readers of committed
records may run concurrently.
"""

from __future__ import annotations

import os
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator

import json

from ..canonical import canonical_bytes
from ..errors import StoreError


@dataclass
class LogRecoveryReport:
    """What open() found: records kept and trailing garbage dropped."""

    records: int = 0
    dropped_bytes: int = 0
    truncated: bool = False


def _frame(doc_bytes: bytes) -> bytes:
    crc = zlib.crc32(doc_bytes) & 0xFFFFFFFF
    return b"%d %08x " % (len(doc_bytes), crc) + doc_bytes + b"\n"


def _parse_line(line: bytes) -> bytes | None:
    """Return document bytes if the framed line is intact, else None."""
    try:
        length_s, crc_s, doc = line.split(b" ", 2)
        length = int(length_s)
        crc = int(crc_s, 16)
    except ValueError:
        return None
    if not doc.endswith(b"\n"):
        return None
    doc = doc[:-1]
    if len(doc) != length:
        return None
    if (zlib.crc32(doc) & 0xFFFFFFFF) != crc:
        return None
    return doc


class LogStore:
    """One append-only log file plus its lock and checkpoints.

    ``fsync`` controls whether appends force the page cache to disk before
    returning; simulations turn it off for speed, the long-running service
    keeps the default.
    """

    def __init__(self, path: str | Path, *, fsync: bool = True, create: bool = True):
        self.path = Path(path)
        self.fsync = fsync
        self._recovery = LogRecoveryReport()
        if create:
            self.path.parent.mkdir(parents=True, exist_ok=True)
        elif not self.path.exists():
            raise StoreError(f"log file missing: {self.path}")
        self._lock_path = self.path.with_suffix(self.path.suffix + ".lock")
        self._acquire_lock()
        self._recover()
        self._fh = open(self.path, "ab")

    # -- lifecycle -----------------------------------------------------------

    def _acquire_lock(self) -> None:
        for _ in range(2):
            try:
                fd = os.open(self._lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                os.write(fd, str(os.getpid()).encode())
                os.close(fd)
                return
            except FileExistsError:
                try:
                    pid = int(self._lock_path.read_text().strip() or "0")
                except (ValueError, OSError):
                    pid = 0
                if pid and _pid_alive(pid):
                    raise StoreError(f"store locked by pid {pid}: {self.path}")
                # stale lock from a dead process: take it over
                self._lock_path.unlink(missing_ok=True)
        raise StoreError(f"could not acquire lock: {self._lock_path}")

    def _recover(self) -> None:
        """Scan the log, keep the longest valid prefix, truncate the rest."""
        if not self.path.exists():
            self.path.touch()
            return
        good_end = 0
        count = 0
        with open(self.path, "rb") as fh:
            data = fh.read()
        pos = 0
        while pos < len(data):
            nl = data.find(b"\n", pos)
            if nl < 0:
                break
            line = data[pos : nl + 1]
            if _parse_line(line) is None:
                break
            count += 1
            pos = nl + 1
            good_end = pos
        dropped = len(data) - good_end
        self._recovery = LogRecoveryReport(records=count, dropped_bytes=dropped, truncated=dropped > 0)
        if dropped:
            with open(self.path, "r+b") as fh:
                fh.truncate(good_end)

    @property
    def recovery(self) -> LogRecoveryReport:
        return self._recovery

    def close(self) -> None:
        if getattr(self, "_fh", None) is not None and not self._fh.closed:
            self._fh.flush()
            self._fh.close()
        self._lock_path.unlink(missing_ok=True)

    def __enter__(self) -> "LogStore":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()

    # -- record io -----------------------------------------------------------

    def append_doc(self, doc: Any) -> None:
        data = _frame(canonical_bytes(doc))
        self._fh.write(data)
        self._fh.flush()
        if self.fsync:
            os.fsync(self._fh.fileno())

    def iter_docs(self) -> Iterator[Any]:
        self._fh.flush()
        with open(self.path, "rb") as fh:
            for line in fh:
                doc = _parse_line(line)
                if doc is None:
                    # trailing torn write from a concurrent crash; committed
                    # prefix ends here
                    break
                yield json.loads(doc.decode("utf-8"))

    # -- checkpoints ---------------------------------------------------------

    def checkpoint_path(self, seq: int) -> Path:
        stem = self.path.name.rsplit(".", 1)[0]
        return self.path.parent / f"{stem}.{seq}.ckpt"

    def write_checkpoint(self, seq: int, state_doc: Any) -> Path:
        path = self.checkpoint_path(seq)
        payload = _frame(canonical_bytes({"seq": seq, "state": state_doc}))
        tmp = path.with_suffix(".ckpt.tmp")
        with open(tmp, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        return path

    def latest_checkpoint(self) -> tuple[int, Any] | None:
        stem = self.path.name.rsplit(".", 1)[0]
        best: tuple[int, Path] | None = None
        for cand in self.path.parent.glob(f"{stem}.*.ckpt"):
            try:
                seq = int(cand.name.split(".")[-2])
            except ValueError:
                continue
            if best is None or seq > best[0]:
                best = (seq, cand)
        if best is None:
            return None
        with open(best[1], "rb") as fh:
            doc = _parse_line(fh.read())
        if doc is None:
            return None
        loaded = json.loads(doc.decode("utf-8"))
        return loaded["seq"], loaded["state"]

    def rewrite(self, docs: Iterable[Any]) -> None:
        """Atomically replace the log body (compaction support)."""
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "wb") as fh:
            for doc in docs:
                fh.write(_frame(canonical_bytes(doc)))
            fh.flush()
            os.fsync(fh.fileno())
        self._fh.close()
        os.replace(tmp, self.path)
        self._fh = open(self.path, "ab")


def rebuild_state(docs: Iterable[Any], reducer: Callable[[Any, Any], Any], initial: Any) -> Any:
    """Fold a record stream into live state. Pure; shared by replay tests."""
    state = initial
    for doc in docs:
        state = reducer(state, doc)
    return state


def _pid_alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True
