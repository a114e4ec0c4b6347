"""Canonical JSON encoding used for log records, content ids and golden tests.

One encoding everywhere: sorted keys, no whitespace, UTF-8, no newlines.
Two structurally equal documents always produce identical bytes, which is
what log checksums, LTM content ids and byte-identical replay tests rely on.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def canonical_bytes(doc: Any) -> bytes:
    return canonical_dumps(doc).encode("utf-8")


def content_id(doc: Any, prefix: str = "") -> str:
    digest = hashlib.sha256(canonical_bytes(doc)).hexdigest()[:16]
    return f"{prefix}{digest}" if prefix else digest


def short_hash(*parts: str) -> str:
    return hashlib.sha1("|".join(parts).encode("utf-8")).hexdigest()[:12]
