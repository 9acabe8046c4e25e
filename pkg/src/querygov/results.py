"""Tabular query results, shared between the guard and the service layer."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ResultTable:
    headers: tuple[tuple[str, str], ...]  # (label, semantic_type)
    rows: tuple[tuple[str, ...], ...]
    row_count: int
    truncated: bool = False

    def __post_init__(self):
        arity = len(self.headers)
        for row in self.rows:
            if len(row) != arity:
                raise ValueError(
                    f"row arity {len(row)} does not match header arity {arity}"
                )

    @staticmethod
    def empty(headers: tuple[tuple[str, str], ...] = ()) -> "ResultTable":
        return ResultTable(headers=headers, rows=(), row_count=0, truncated=False)

    def to_payload(self) -> dict:
        return {
            "headers": [{"label": h, "type": t} for h, t in self.headers],
            "rows": [list(r) for r in self.rows],
            "row_count": self.row_count,
            "truncated": self.truncated,
        }
