"""Canonical rendering of AST nodes back to SQL text.

render(parse(q)) reparses to an AST structurally equal to parse(q). Literal
nodes whose ids appear in ``lifted`` render as positional placeholders; that
is how the parameterizer produces its template.
"""

from __future__ import annotations

from .nodes import (
    AndExpr,
    BetweenPredicate,
    ColumnRef,
    Comparison,
    Expr,
    FunctionCall,
    InPredicate,
    IsNullPredicate,
    Join,
    LikePredicate,
    Literal,
    NotExpr,
    OrderItem,
    OrExpr,
    Projection,
    SelectStatement,
    Star,
    TableRef,
)

_Lifted = frozenset


def quote_string(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def render_literal(lit: Literal, lifted: _Lifted = frozenset()) -> str:
    if id(lit) in lifted:
        return "?"
    if lit.kind == "string":
        return quote_string(str(lit.value))
    return str(lit.value)


def render_operand(node, lifted: _Lifted = frozenset()) -> str:
    if isinstance(node, Literal):
        return render_literal(node, lifted)
    if isinstance(node, ColumnRef):
        return f"{node.qualifier}.{node.name}" if node.qualifier else node.name
    if isinstance(node, FunctionCall):
        arg = "*" if isinstance(node.arg, Star) else render_operand(node.arg, lifted)
        return f"{node.func}({arg})"
    if isinstance(node, Star):
        return "*"
    raise TypeError(f"cannot render operand {node!r}")


def _prec(expr: Expr) -> int:
    if isinstance(expr, OrExpr):
        return 1
    if isinstance(expr, AndExpr):
        return 2
    if isinstance(expr, NotExpr):
        return 3
    return 4


def render_expr(expr: Expr, lifted: _Lifted = frozenset()) -> str:
    if isinstance(expr, OrExpr):
        parts = [
            _maybe_paren(item, 1, lifted) for item in expr.items
        ]
        return " OR ".join(parts)
    if isinstance(expr, AndExpr):
        parts = [
            _maybe_paren(item, 2, lifted) for item in expr.items
        ]
        return " AND ".join(parts)
    if isinstance(expr, NotExpr):
        inner = render_expr(expr.item, lifted)
        if _prec(expr.item) < 4:
            inner = f"({inner})"
        return f"NOT {inner}"
    if isinstance(expr, Comparison):
        return (
            f"{render_operand(expr.left, lifted)} {expr.op} "
            f"{render_operand(expr.right, lifted)}"
        )
    if isinstance(expr, InPredicate):
        items = ", ".join(render_literal(i, lifted) for i in expr.items)
        op = "NOT IN" if expr.negated else "IN"
        return f"{render_operand(expr.operand, lifted)} {op} ({items})"
    if isinstance(expr, LikePredicate):
        op = "NOT LIKE" if expr.negated else "LIKE"
        return (
            f"{render_operand(expr.operand, lifted)} {op} "
            f"{render_literal(expr.pattern, lifted)}"
        )
    if isinstance(expr, BetweenPredicate):
        op = "NOT BETWEEN" if expr.negated else "BETWEEN"
        return (
            f"{render_operand(expr.operand, lifted)} {op} "
            f"{render_literal(expr.low, lifted)} AND {render_literal(expr.high, lifted)}"
        )
    if isinstance(expr, IsNullPredicate):
        op = "IS NOT NULL" if expr.negated else "IS NULL"
        return f"{render_operand(expr.operand, lifted)} {op}"
    raise TypeError(f"cannot render expression {expr!r}")


def _maybe_paren(expr: Expr, parent_prec: int, lifted: _Lifted) -> str:
    text = render_expr(expr, lifted)
    if _prec(expr) <= parent_prec:
        return f"({text})"
    return text


def render_projection(proj: Projection, lifted: _Lifted = frozenset()) -> str:
    text = render_operand(proj.expr, lifted)
    if proj.alias:
        text += f" AS {proj.alias}"
    return text


def render_table_ref(ref: TableRef) -> str:
    return f"{ref.name} AS {ref.alias}" if ref.alias else ref.name


def render_join(join: Join, lifted: _Lifted = frozenset()) -> str:
    return (
        f"{join.kind} JOIN {render_table_ref(join.table)} "
        f"ON {render_expr(join.condition, lifted)}"
    )


def render_order_item(item: OrderItem, lifted: _Lifted = frozenset()) -> str:
    text = render_operand(item.expr, lifted)
    if item.direction:
        text += f" {item.direction}"
    return text


def render_statement(stmt: SelectStatement, lifted: _Lifted = frozenset()) -> str:
    parts = [
        "SELECT " + ", ".join(render_projection(p, lifted) for p in stmt.projections),
        "FROM " + render_table_ref(stmt.from_table),
    ]
    for join in stmt.joins:
        parts.append(render_join(join, lifted))
    if stmt.where is not None:
        parts.append("WHERE " + render_expr(stmt.where, lifted))
    if stmt.group_by:
        parts.append(
            "GROUP BY " + ", ".join(render_operand(c, lifted) for c in stmt.group_by)
        )
    if stmt.having is not None:
        parts.append("HAVING " + render_expr(stmt.having, lifted))
    if stmt.order_by:
        parts.append(
            "ORDER BY "
            + ", ".join(render_order_item(o, lifted) for o in stmt.order_by)
        )
    if stmt.limit is not None:
        parts.append(f"LIMIT {stmt.limit}")
    return " ".join(parts)
