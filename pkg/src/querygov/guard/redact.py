"""PII redaction of result tables."""

from __future__ import annotations

from ..results import ResultTable
from ..textnorm import fold_text

REDACTED_MARKER = "[REDACTED]"


def redact_results(table: ResultTable, planned_redactions: list[str]) -> ResultTable:
    """Replace every cell of the planned columns with the fixed marker.

    Row count and all other columns are untouched; with no planned
    redactions the table comes back unchanged.
    """
    if not planned_redactions:
        return table
    targets = {fold_text(label) for label in planned_redactions}
    indexes = [
        i for i, (label, _) in enumerate(table.headers) if fold_text(label) in targets
    ]
    if not indexes:
        return table
    index_set = set(indexes)
    rows = tuple(
        tuple(
            REDACTED_MARKER if i in index_set else cell for i, cell in enumerate(row)
        )
        for row in table.rows
    )
    return ResultTable(table.headers, rows, table.row_count, table.truncated)
