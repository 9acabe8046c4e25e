"""Incremental source-to-analytics synchronization.

Extraction is timestamp-delta based, cleaning is per record, loading is a
batched upsert keyed by record_id. The cursor only advances after a fully
successful cycle, so any aborted cycle replays with idempotent effect
(at-least-once semantics). A process-wide lock keeps cycles serial.
"""

from __future__ import annotations

import hashlib
import json
import sqlite3
import threading
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Protocol

from .cleaning import CleanRecord, CleaningPipeline, RawRecord

EPOCH_ISO = "1970-01-01T00:00:00"

_CYCLE_LOCK = threading.Lock()


def now_iso() -> str:
    return datetime.now(timezone.utc).replace(tzinfo=None).isoformat(timespec="seconds")


class SyncAbort(RuntimeError):
    """Cycle-level failure; the cursor must not advance."""


@dataclass(frozen=True)
class BatchStats:
    extracted: int = 0
    cleaned: int = 0
    upserted: int = 0
    hard_rejected: int = 0
    flagged: int = 0
    inserted: int = 0
    updated: int = 0


@dataclass(frozen=True)
class SyncCursor:
    last_successful_sync: str = EPOCH_ISO
    last_batch_stats: BatchStats = field(default_factory=BatchStats)
    cycle_interval_hours: int = 72


def load_cursor(path: str | Path) -> SyncCursor:
    path = Path(path)
    if not path.exists():
        return SyncCursor()
    doc = json.loads(path.read_text(encoding="utf-8"))
    return SyncCursor(
        last_successful_sync=doc.get("last_successful_sync", EPOCH_ISO),
        last_batch_stats=BatchStats(**doc.get("last_batch_stats", {})),
        cycle_interval_hours=doc.get("cycle_interval_hours", 72),
    )


def save_cursor(cursor: SyncCursor, path: str | Path) -> None:
    doc = {
        "last_successful_sync": cursor.last_successful_sync,
        "last_batch_stats": asdict(cursor.last_batch_stats),
        "cycle_interval_hours": cursor.cycle_interval_hours,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class UpsertStats:
    inserted: int = 0
    updated: int = 0
    failures: tuple[tuple[str, str], ...] = ()  # (record_id, message)

    @property
    def succeeded(self) -> int:
        return self.inserted + self.updated


class StoreAdapter(Protocol):
    def extract_since(self, since: str) -> list[RawRecord]: ...

    def upsert(self, records: Iterable[CleanRecord]) -> UpsertStats: ...


class SqliteStore:
    """Relational store adapter; both sync sides expose the same record shape.

    ``data_columns`` excludes record_id and modified_at, which every record
    carries. ``check_values`` adds per-column CHECK constraints on creation so
    target-side constraint violations surface as per-record upsert failures.
    """

    def __init__(self, path: str | Path, table: str, data_columns: list[str]):
        self.path = str(path)
        self.table = table
        self.data_columns = list(data_columns)

    def connect(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.path)
        conn.execute("PRAGMA foreign_keys = ON")
        return conn

    def ensure_schema(self, check_values: dict[str, list[str]] | None = None) -> None:
        checks = []
        for col, allowed in (check_values or {}).items():
            options = ", ".join("'" + v.replace("'", "''") + "'" for v in allowed)
            checks.append(f"CHECK ({col} IN ({options}))")
        cols = ", ".join(f'"{c}" TEXT' for c in self.data_columns)
        ddl = (
            f'CREATE TABLE IF NOT EXISTS "{self.table}" '
            f'("record_id" TEXT PRIMARY KEY, "modified_at" TEXT NOT NULL, {cols}'
            + ("".join(", " + c for c in checks))
            + ")"
        )
        with self.connect() as conn:
            conn.execute(ddl)

    def extract_since(self, since: str) -> list[RawRecord]:
        cols = ", ".join(f'"{c}"' for c in self.data_columns)
        sql = (
            f'SELECT "record_id", "modified_at", {cols} FROM "{self.table}" '
            f"WHERE modified_at > ? ORDER BY modified_at, record_id"
        )
        try:
            with self.connect() as conn:
                rows = conn.execute(sql, (since,)).fetchall()
        except sqlite3.Error as exc:
            raise SyncAbort(f"source extraction failed: {exc}") from exc
        return [
            RawRecord(
                record_id=row[0],
                modified_at=row[1],
                fields={
                    name: (row[i + 2] if row[i + 2] is not None else "")
                    for i, name in enumerate(self.data_columns)
                },
            )
            for row in rows
        ]

    def upsert(self, records: Iterable[CleanRecord]) -> UpsertStats:
        inserted = updated = 0
        failures: list[tuple[str, str]] = []
        conn = self.connect()
        try:
            conn.execute("BEGIN")
            for record in records:
                values = [record.fields.get(c, "") for c in self.data_columns]
                try:
                    conn.execute("SAVEPOINT rec")
                    exists = conn.execute(
                        f'SELECT 1 FROM "{self.table}" WHERE record_id = ?',
                        (record.record_id,),
                    ).fetchone()
                    if exists:
                        sets = ", ".join(f'"{c}" = ?' for c in self.data_columns)
                        conn.execute(
                            f'UPDATE "{self.table}" SET "modified_at" = ?, {sets} '
                            f"WHERE record_id = ?",
                            [record.modified_at, *values, record.record_id],
                        )
                        updated += 1
                    else:
                        placeholders = ", ".join("?" for _ in range(len(values) + 2))
                        cols = ", ".join(f'"{c}"' for c in self.data_columns)
                        conn.execute(
                            f'INSERT INTO "{self.table}" '
                            f'("record_id", "modified_at", {cols}) VALUES ({placeholders})',
                            [record.record_id, record.modified_at, *values],
                        )
                        inserted += 1
                    conn.execute("RELEASE rec")
                except sqlite3.Error as exc:
                    conn.execute("ROLLBACK TO rec")
                    conn.execute("RELEASE rec")
                    failures.append((record.record_id, str(exc)))
            conn.commit()
        except sqlite3.Error as exc:
            conn.rollback()
            raise SyncAbort(f"target upsert failed: {exc}") from exc
        finally:
            conn.close()
        return UpsertStats(inserted, updated, tuple(failures))

    def snapshot_hash(self) -> str:
        cols = ", ".join(f'"{c}"' for c in self.data_columns)
        sql = (
            f'SELECT "record_id", "modified_at", {cols} FROM "{self.table}" '
            f"ORDER BY record_id"
        )
        digest = hashlib.sha256()
        with self.connect() as conn:
            for row in conn.execute(sql):
                digest.update(repr(row).encode("utf-8"))
        return digest.hexdigest()

    def count(self) -> int:
        with self.connect() as conn:
            return conn.execute(f'SELECT COUNT(*) FROM "{self.table}"').fetchone()[0]

    def row(self, record_id: str) -> dict[str, str] | None:
        cols = ["record_id", "modified_at", *self.data_columns]
        sel = ", ".join(f'"{c}"' for c in cols)
        with self.connect() as conn:
            row = conn.execute(
                f'SELECT {sel} FROM "{self.table}" WHERE record_id = ?', (record_id,)
            ).fetchone()
        if row is None:
            return None
        return dict(zip(cols, row))


def extract_delta(source: StoreAdapter, since: str) -> list[RawRecord]:
    """Exactly the records modified after ``since``, in (modified_at, id) order."""
    return source.extract_since(since)


def upsert_batch(target: StoreAdapter, records: list[CleanRecord]) -> UpsertStats:
    return target.upsert(records)


Hooks = dict[str, Callable[[], None]]


def run_sync_cycle(
    source: StoreAdapter,
    target: StoreAdapter,
    pipeline: CleaningPipeline,
    cursor: SyncCursor,
    *,
    cursor_path: str | Path | None = None,
    report_sink: Callable[[str, str, str], None] | None = None,
    hooks: Hooks | None = None,
) -> SyncCursor:
    """One extract -> clean -> upsert -> persist cycle.

    Any exception between phases leaves the cursor untouched; rerunning the
    cycle replays the same delta with identical final target state.
    """
    hooks = hooks or {}

    def fire(phase: str) -> None:
        hook = hooks.get(phase)
        if hook is not None:
            hook()

    with _CYCLE_LOCK:
        raw = extract_delta(source, cursor.last_successful_sync)
        fire("after_extract")

        cleaned = [pipeline.clean_record(r) for r in raw]
        fire("after_clean")

        to_upsert = [c for c in cleaned if not c.has_reject_flag()]
        rejected = len(cleaned) - len(to_upsert)
        stats = upsert_batch(target, to_upsert)
        fire("after_upsert")

        flagged = 0
        if report_sink is not None:
            for record in cleaned:
                for flag in record.flags:
                    report_sink(record.record_id, flag.rule_id, flag.message)
                    flagged += 1
        else:
            flagged = sum(len(r.flags) for r in cleaned)

        failed_ids = {record_id for record_id, _ in stats.failures}
        upserted_times = [
            c.modified_at for c in to_upsert if c.record_id not in failed_ids
        ]
        new_sync = (
            max(upserted_times) if upserted_times else cursor.last_successful_sync
        )
        new_cursor = replace(
            cursor,
            last_successful_sync=new_sync,
            last_batch_stats=BatchStats(
                extracted=len(raw),
                cleaned=len(cleaned),
                upserted=stats.succeeded,
                hard_rejected=rejected + len(stats.failures),
                flagged=flagged,
                inserted=stats.inserted,
                updated=stats.updated,
            ),
        )
        fire("before_persist")
        if cursor_path is not None:
            save_cursor(new_cursor, cursor_path)
        return new_cursor
