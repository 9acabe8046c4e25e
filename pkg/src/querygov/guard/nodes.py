"""AST node types for the SELECT-only dialect subset.

Node equality is structural: spans and resolved bindings are excluded, so
parse(render(ast)) == ast is a meaningful round-trip check. Identifier nodes
get their (table, column) binding filled in by schema analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Span:
    start: int
    end: int


NO_SPAN = Span(-1, -1)


@dataclass
class Literal:
    value: str | int | float
    kind: str  # "string" | "number"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class Star:
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class ColumnRef:
    qualifier: str | None
    name: str
    span: Span = field(default=NO_SPAN, compare=False)
    binding: tuple[str, str] | None = field(default=None, compare=False)


@dataclass
class FunctionCall:
    func: str
    arg: Union[ColumnRef, Star, None]
    span: Span = field(default=NO_SPAN, compare=False)


Operand = Union[ColumnRef, Literal, FunctionCall]


@dataclass
class Comparison:
    op: str
    left: Operand
    right: Operand
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class InPredicate:
    operand: Operand
    items: list[Literal]
    negated: bool = False
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class LikePredicate:
    operand: Operand
    pattern: Literal
    negated: bool = False
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class BetweenPredicate:
    operand: Operand
    low: Literal
    high: Literal
    negated: bool = False
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class IsNullPredicate:
    operand: Operand
    negated: bool = False
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class NotExpr:
    item: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class AndExpr:
    items: list["Expr"]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class OrExpr:
    items: list["Expr"]
    span: Span = field(default=NO_SPAN, compare=False)


Expr = Union[
    Comparison,
    InPredicate,
    LikePredicate,
    BetweenPredicate,
    IsNullPredicate,
    NotExpr,
    AndExpr,
    OrExpr,
]


@dataclass
class Projection:
    expr: Union[ColumnRef, FunctionCall, Star]
    alias: str | None = None
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class TableRef:
    name: str
    alias: str | None = None
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class Join:
    kind: str  # "INNER" | "LEFT"
    table: TableRef
    condition: Expr
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class OrderItem:
    expr: Union[ColumnRef, FunctionCall]
    direction: str | None = None  # "ASC" | "DESC" | None


@dataclass
class SelectStatement:
    projections: list[Projection]
    from_table: TableRef
    joins: list[Join] = field(default_factory=list)
    where: Expr | None = None
    group_by: list[ColumnRef] = field(default_factory=list)
    having: Expr | None = None
    order_by: list[OrderItem] = field(default_factory=list)
    limit: int | None = None
    span: Span = field(default=NO_SPAN, compare=False)

    def tables(self) -> list[TableRef]:
        return [self.from_table, *(j.table for j in self.joins)]


def iter_expressions(stmt: SelectStatement):
    """Yield every predicate expression tree of the statement."""
    for join in stmt.joins:
        yield "join", join.condition
    if stmt.where is not None:
        yield "where", stmt.where
    if stmt.having is not None:
        yield "having", stmt.having


def walk_expr(expr: Expr):
    """Depth-first walk of a predicate tree, yielding every node."""
    yield expr
    if isinstance(expr, (AndExpr, OrExpr)):
        for item in expr.items:
            yield from walk_expr(item)
    elif isinstance(expr, NotExpr):
        yield from walk_expr(expr.item)


def predicate_operands(expr: Expr):
    """Yield (operand-or-literal, role) pairs of a single predicate node."""
    if isinstance(expr, Comparison):
        yield expr.left, "operand"
        yield expr.right, "operand"
    elif isinstance(expr, InPredicate):
        yield expr.operand, "operand"
        for item in expr.items:
            yield item, "literal"
    elif isinstance(expr, LikePredicate):
        yield expr.operand, "operand"
        yield expr.pattern, "literal"
    elif isinstance(expr, BetweenPredicate):
        yield expr.operand, "operand"
        yield expr.low, "literal"
        yield expr.high, "literal"
    elif isinstance(expr, IsNullPredicate):
        yield expr.operand, "operand"


def iter_column_refs(stmt: SelectStatement):
    """Every ColumnRef in the statement, including aggregate arguments."""
    for proj in stmt.projections:
        if isinstance(proj.expr, ColumnRef):
            yield proj.expr
        elif isinstance(proj.expr, FunctionCall) and isinstance(proj.expr.arg, ColumnRef):
            yield proj.expr.arg
    for _, tree in iter_expressions(stmt):
        for node in walk_expr(tree):
            for operand, _ in predicate_operands(node):
                if isinstance(operand, ColumnRef):
                    yield operand
                elif isinstance(operand, FunctionCall) and isinstance(
                    operand.arg, ColumnRef
                ):
                    yield operand.arg
    for col in stmt.group_by:
        yield col
    for item in stmt.order_by:
        if isinstance(item.expr, ColumnRef):
            yield item.expr
        elif isinstance(item.expr, FunctionCall) and isinstance(item.expr.arg, ColumnRef):
            yield item.expr.arg


def iter_function_calls(stmt: SelectStatement):
    for proj in stmt.projections:
        if isinstance(proj.expr, FunctionCall):
            yield proj.expr
    for _, tree in iter_expressions(stmt):
        for node in walk_expr(tree):
            for operand, _ in predicate_operands(node):
                if isinstance(operand, FunctionCall):
                    yield operand
    for item in stmt.order_by:
        if isinstance(item.expr, FunctionCall):
            yield item.expr


def iter_literals(stmt: SelectStatement):
    """Every literal in predicate positions, in source order."""
    found: list[Literal] = []
    for _, tree in iter_expressions(stmt):
        for node in walk_expr(tree):
            for operand, _ in predicate_operands(node):
                if isinstance(operand, Literal):
                    found.append(operand)
    found.sort(key=lambda lit: lit.span.start)
    return found
