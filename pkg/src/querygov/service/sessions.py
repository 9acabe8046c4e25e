"""Session permissions: sessions are issued out of band and resolved here."""

from __future__ import annotations

from dataclasses import dataclass

from ..catalog import SchemaCatalog
from ..textnorm import fold_text


@dataclass(frozen=True)
class SessionPermission:
    session_token: str
    allowed_tables: frozenset[str]  # folded table names
    may_query: bool = True

    def allows_table(self, name: str) -> bool:
        return fold_text(name) in self.allowed_tables


class SessionRegistry:
    def __init__(self, permissions: dict[str, SessionPermission]):
        self._permissions = dict(permissions)

    @staticmethod
    def from_config(doc: dict, catalog: SchemaCatalog) -> "SessionRegistry":
        """``doc`` maps token -> {"allowed_tables": [...], "may_query": bool}.

        A session's allowed_tables must be a subset of the catalog.
        """
        catalog_tables = {fold_text(t.name) for t in catalog.tables}
        permissions: dict[str, SessionPermission] = {}
        for token, raw in doc.items():
            allowed = frozenset(fold_text(t) for t in raw.get("allowed_tables", []))
            unknown = allowed - catalog_tables
            if unknown:
                raise ValueError(
                    f"session {token!r} grants unknown tables: {sorted(unknown)}"
                )
            permissions[token] = SessionPermission(
                token, allowed, raw.get("may_query", True)
            )
        return SessionRegistry(permissions)

    @staticmethod
    def single(token: str, catalog: SchemaCatalog, may_query: bool = True) -> "SessionRegistry":
        allowed = frozenset(fold_text(t.name) for t in catalog.tables)
        return SessionRegistry({token: SessionPermission(token, allowed, may_query)})

    def resolve(self, token: str | None) -> SessionPermission | None:
        if not token:
            return None
        return self._permissions.get(token)
