"""Append-only audit logging, anonymized by construction.

Events carry session tokens (never user identifiers) and hashed payload
summaries; the validator rejects anything shaped like a raw value before it
can reach storage. File-backed storage syncs before acknowledging.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path

_HASH_RE = re.compile(r"^[0-9a-f]{64}$")

PHASES = frozenset(
    {
        "submitted",
        "loading",
        "generating_query",
        "executing_query",
        "translating",
        "ready",
        "error",
        "terminal",
    }
)
VERDICT_CODES = frozenset(
    {"pass", "reject_syntax", "reject_schema", "reject_policy", "none"}
)
CATEGORIES = frozenset(
    {"ambiguous", "schema_misalignment", "policy_blocked", "technical_error", "none"}
)
ALLOWED_PAYLOAD_KEYS = frozenset(
    {"question_hash", "sql_hash", "verdict_code", "row_count", "duration_ms",
     "category", "attempts"}
)


class AuditValidationError(ValueError):
    pass


def hash_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class AuditEvent:
    session_token: str
    job_id: str
    phase: str
    timestamp: str
    payload: dict = field(default_factory=dict)
    seq: int = 0

    def to_doc(self) -> dict:
        return {
            "session_token": self.session_token,
            "job_id": self.job_id,
            "phase": self.phase,
            "timestamp": self.timestamp,
            "payload": self.payload,
            "seq": self.seq,
        }


def validate_event(event: AuditEvent) -> None:
    """Reject events that could leak user identifiers or raw cell values."""
    if event.phase not in PHASES:
        raise AuditValidationError(f"unknown phase {event.phase!r}")
    extra = set(event.payload) - ALLOWED_PAYLOAD_KEYS
    if extra:
        raise AuditValidationError(
            f"payload keys not allowed in audit events: {sorted(extra)}"
        )
    for key in ("question_hash", "sql_hash"):
        value = event.payload.get(key)
        if value is not None and not _HASH_RE.match(str(value)):
            raise AuditValidationError(f"{key} must be a sha256 hex digest")
    for key in ("row_count", "duration_ms", "attempts"):
        value = event.payload.get(key)
        if value is not None and (not isinstance(value, int) or value < 0):
            raise AuditValidationError(f"{key} must be a non-negative integer")
    verdict = event.payload.get("verdict_code")
    if verdict is not None and verdict not in VERDICT_CODES:
        raise AuditValidationError(f"unknown verdict_code {verdict!r}")
    category = event.payload.get("category")
    if category is not None and category not in CATEGORIES:
        raise AuditValidationError(f"unknown category {category!r}")


class MemoryAuditLog:
    def __init__(self):
        self._events: list[AuditEvent] = []
        self._lock = threading.Lock()
        self._seq = itertools.count(1)

    def append(self, event: AuditEvent) -> None:
        validate_event(event)
        with self._lock:
            self._events.append(
                AuditEvent(
                    event.session_token,
                    event.job_id,
                    event.phase,
                    event.timestamp,
                    dict(event.payload),
                    next(self._seq),
                )
            )

    def events(self, job_id: str | None = None) -> list[AuditEvent]:
        with self._lock:
            events = list(self._events)
        if job_id is not None:
            events = [e for e in events if e.job_id == job_id]
        return sorted(events, key=lambda e: (e.timestamp, e.seq))


class FileAuditLog:
    """JSONL audit store; each append is flushed and fsynced before returning."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._seq = itertools.count(1)

    def append(self, event: AuditEvent) -> None:
        validate_event(event)
        doc = event.to_doc()
        with self._lock:
            doc["seq"] = next(self._seq)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(doc, ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())

    def events(self, job_id: str | None = None) -> list[AuditEvent]:
        if not self.path.exists():
            return []
        out: list[AuditEvent] = []
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            if job_id is not None and doc["job_id"] != job_id:
                continue
            out.append(
                AuditEvent(
                    doc["session_token"],
                    doc["job_id"],
                    doc["phase"],
                    doc["timestamp"],
                    doc.get("payload", {}),
                    doc.get("seq", 0),
                )
            )
        return sorted(out, key=lambda e: (e.timestamp, e.seq))


def record_audit(log, event: AuditEvent) -> bool:
    """Append with durability; returns False (audit-degraded) on storage failure.

    Invariant violations are programming errors and raise instead.
    """
    validate_event(event)
    try:
        log.append(event)
    except OSError:
        return False
    return True
