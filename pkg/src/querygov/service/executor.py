"""Read-only statement execution against the analytics store.

Connections run with query_only set and a progress-handler deadline, so
query traffic can never mutate the store or hold it hostage. The permission
gate fires before any store interaction.
"""

from __future__ import annotations

import hashlib
import sqlite3
import time
from pathlib import Path

from ..catalog import SchemaCatalog
from ..guard.nodes import ColumnRef, FunctionCall, SelectStatement, Star
from ..guard.parameterize import ParameterizedStatement
from ..guard.redact import redact_results
from ..results import ResultTable
from ..textnorm import fold_text
from .sessions import SessionPermission

_TYPE_MAP = {
    "text": "TEXT",
    "identifier": "TEXT",
    "boolean": "TEXT",
    "date": "TEXT",
    "integer": "INTEGER",
    "decimal": "REAL",
}


class ExecutionError(RuntimeError):
    pass


class ExecutionTimeout(ExecutionError):
    pass


class AccessDenied(ExecutionError):
    pass


class AnalyticsStore:
    def __init__(self, path: str | Path):
        self.path = str(path)

    def connect(self) -> sqlite3.Connection:
        return sqlite3.connect(self.path)

    def connect_readonly(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.path)
        conn.execute("PRAGMA query_only = ON")
        return conn

    def snapshot_hash(self) -> str:
        digest = hashlib.sha256()
        with self.connect_readonly() as conn:
            tables = [
                row[0]
                for row in conn.execute(
                    "SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name"
                )
            ]
            for table in tables:
                digest.update(table.encode("utf-8"))
                for row in conn.execute(f'SELECT * FROM "{table}" ORDER BY rowid'):
                    digest.update(repr(row).encode("utf-8"))
        return digest.hexdigest()


def create_schema(conn: sqlite3.Connection, catalog: SchemaCatalog) -> None:
    for table in catalog.tables:
        cols = ", ".join(
            f'"{c.name}" {_TYPE_MAP[c.semantic_type]}' for c in table.columns
        )
        conn.execute(f'CREATE TABLE IF NOT EXISTS "{table.name}" ({cols})')
    conn.commit()


def result_header_types(ast: SelectStatement, catalog: SchemaCatalog) -> list[str]:
    """Semantic type per output column, in projection order (stars expanded)."""

    def column_type(binding: tuple[str, str] | None) -> str:
        if binding is None:
            return "text"
        table = catalog.table(binding[0])
        if table is None:
            return "text"
        column = table.column(binding[1])
        return column.semantic_type if column is not None else "text"

    types: list[str] = []
    for proj in ast.projections:
        if isinstance(proj.expr, Star):
            for ref in ast.tables():
                table = catalog.table(ref.name)
                if table is not None:
                    types.extend(c.semantic_type for c in table.columns)
        elif isinstance(proj.expr, ColumnRef):
            types.append(column_type(proj.expr.binding))
        elif isinstance(proj.expr, FunctionCall):
            func = fold_text(proj.expr.func)
            if func == "count":
                types.append("integer")
            elif func == "avg":
                types.append("decimal")
            elif isinstance(proj.expr.arg, ColumnRef):
                types.append(column_type(proj.expr.arg.binding))
            else:
                types.append("decimal")
    return types


def execute_statement(
    stmt: ParameterizedStatement,
    store: AnalyticsStore,
    session: SessionPermission | None = None,
    referenced_tables: set[str] | None = None,
    row_cap: int = 1000,
    timeout_s: float = 15.0,
    redaction_labels: list[str] | None = None,
    header_types: list[str] | None = None,
) -> ResultTable:
    """Execute with bound parameters under a read-only, time-limited connection.

    The session must permit every referenced table before the store is even
    touched; results are capped at ``row_cap`` rows and PII columns are
    redacted on the way out.
    """
    if session is not None:
        if not session.may_query:
            raise AccessDenied("session may not query")
        for table in sorted(referenced_tables or ()):
            if not session.allows_table(table):
                raise AccessDenied(f"access denied to table {table!r}")

    conn = store.connect_readonly()
    deadline = time.monotonic() + timeout_s
    conn.set_progress_handler(lambda: 1 if time.monotonic() > deadline else 0, 2000)
    try:
        try:
            cursor = conn.execute(stmt.sql_template, stmt.bind_values())
            fetched = cursor.fetchmany(row_cap + 1)
        except sqlite3.OperationalError as exc:
            if "interrupt" in str(exc).lower():
                raise ExecutionTimeout(f"execution timeout after {timeout_s}s") from exc
            raise ExecutionError(str(exc)) from exc
        truncated = len(fetched) > row_cap
        kept = fetched[:row_cap]
        labels = [d[0] for d in cursor.description or []]
        types = list(header_types or [])
        if len(types) < len(labels):
            types.extend("text" for _ in range(len(labels) - len(types)))
        headers = tuple(
            (label, types[i]) for i, label in enumerate(labels)
        )
        rows = tuple(
            tuple("" if cell is None else str(cell) for cell in row) for row in kept
        )
    finally:
        conn.close()
    table = ResultTable(headers, rows, len(rows), truncated)
    return redact_results(table, redaction_labels or [])
