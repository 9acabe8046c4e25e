"""Literal lifting: predicate literals become bound parameters.

Structural tokens (identifiers, keywords, LIMIT counts) are never
parameterized; every literal in a predicate position is lifted, in
left-to-right source order, so user-influenced values can never change
statement structure.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..catalog import SchemaCatalog
from .nodes import (
    BetweenPredicate,
    ColumnRef,
    Comparison,
    InPredicate,
    LikePredicate,
    Literal,
    SelectStatement,
    iter_expressions,
    iter_literals,
    walk_expr,
)
from .render import render_statement


class ParameterizeError(ValueError):
    pass


@dataclass(frozen=True)
class Parameter:
    value: str | int | float
    semantic_type: str


@dataclass(frozen=True)
class ParameterizedStatement:
    sql_template: str
    parameters: tuple[Parameter, ...]

    def __post_init__(self):
        placeholders = self.sql_template.count("?")
        if placeholders != len(self.parameters):
            raise ParameterizeError(
                f"template has {placeholders} placeholders but "
                f"{len(self.parameters)} parameters"
            )

    def bind_values(self) -> list:
        return [p.value for p in self.parameters]


def _column_type(node, catalog: SchemaCatalog) -> str | None:
    if isinstance(node, ColumnRef) and node.binding is not None:
        table = catalog.table(node.binding[0])
        if table is not None:
            column = table.column(node.binding[1])
            if column is not None:
                return column.semantic_type
    return None


def _literal_types(ast: SelectStatement, catalog: SchemaCatalog) -> dict[int, str]:
    """Semantic type per literal, from the column it is compared against."""
    types: dict[int, str] = {}
    for _, tree in iter_expressions(ast):
        for node in walk_expr(tree):
            anchor = None
            literals: list[Literal] = []
            if isinstance(node, Comparison):
                operands = [node.left, node.right]
                literals = [op for op in operands if isinstance(op, Literal)]
                anchors = [op for op in operands if not isinstance(op, Literal)]
                anchor = anchors[0] if anchors else None
            elif isinstance(node, (InPredicate, LikePredicate, BetweenPredicate)):
                anchor = node.operand
                if isinstance(node, InPredicate):
                    literals = list(node.items)
                elif isinstance(node, LikePredicate):
                    literals = [node.pattern]
                else:
                    literals = [node.low, node.high]
            if not literals:
                continue
            column_type = _column_type(anchor, catalog) if anchor is not None else None
            for lit in literals:
                if column_type is not None:
                    types[id(lit)] = column_type
    return types


def _fallback_type(lit: Literal) -> str:
    if lit.kind == "string":
        return "text"
    return "integer" if isinstance(lit.value, int) else "decimal"


def parameterize(ast: SelectStatement, catalog: SchemaCatalog | None = None) -> ParameterizedStatement:
    literals = iter_literals(ast)
    for lit in literals:
        if not isinstance(lit.value, (str, int, float)):
            raise ParameterizeError(
                f"literal of unsupported type {type(lit.value).__name__}"
            )
    typed = _literal_types(ast, catalog) if catalog is not None else {}
    parameters = tuple(
        Parameter(lit.value, typed.get(id(lit), _fallback_type(lit)))
        for lit in literals
    )
    template = render_statement(ast, frozenset(id(lit) for lit in literals))
    return ParameterizedStatement(template, parameters)


def render_inlined(ast: SelectStatement) -> str:
    """The canonical rendering with all literals left in place."""
    return render_statement(ast)
