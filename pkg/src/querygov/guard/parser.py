"""Recursive-descent parser for the SELECT-only dialect subset.

Supported grammar: SELECT with column/aggregate projections, FROM with
INNER/LEFT JOIN ... ON, WHERE with AND/OR/NOT over comparisons and
(NOT) IN/LIKE/BETWEEN/IS NULL, GROUP BY, HAVING, ORDER BY, LIMIT. Everything
else — DDL, DML, UNION, subqueries, multiple statements — is a syntax
rejection carrying the offending position.
"""

from __future__ import annotations

from .lexer import Token, tokenize_sql
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
    Span,
    Star,
    TableRef,
)
from .verdict import SqlSyntaxError

_STATEMENT_KEYWORDS = {
    "insert", "update", "delete", "drop", "create", "alter", "truncate",
    "merge", "replace", "grant", "revoke", "with", "union", "pragma",
    "attach", "detach", "vacuum", "exec", "execute",
}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize_sql(text)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "KEYWORD" and tok.value.lower() in words

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind == "KEYWORD" and tok.value.lower() == word:
            return self.advance()
        raise SqlSyntaxError(f"expected {word.upper()}, found {tok.value or 'end of input'!r}", tok.pos)

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind == kind:
            return self.advance()
        raise SqlSyntaxError(f"expected {what}, found {tok.value or 'end of input'!r}", tok.pos)

    # -- entry point --------------------------------------------------------

    def parse_statement(self) -> SelectStatement:
        first = self.peek()
        if first.kind == "EOF":
            raise SqlSyntaxError("empty statement", 0)
        if not self.at_keyword("select"):
            lowered = first.value.lower()
            if lowered in _STATEMENT_KEYWORDS:
                raise SqlSyntaxError(
                    f"only SELECT statements are supported, found {first.value.upper()}",
                    first.pos,
                )
            raise SqlSyntaxError("statement must start with SELECT", first.pos)
        start = self.advance().pos

        projections = self.parse_projections()
        self.expect_keyword("from")
        from_table = self.parse_table_ref()
        joins = []
        while self.at_keyword("join", "inner", "left"):
            joins.append(self.parse_join())

        where = None
        if self.at_keyword("where"):
            self.advance()
            where = self.parse_expr()

        group_by: list[ColumnRef] = []
        if self.at_keyword("group"):
            self.advance()
            self.expect_keyword("by")
            group_by.append(self.parse_column_ref())
            while self.peek().kind == "COMMA":
                self.advance()
                group_by.append(self.parse_column_ref())

        having = None
        if self.at_keyword("having"):
            self.advance()
            having = self.parse_expr()

        order_by: list[OrderItem] = []
        if self.at_keyword("order"):
            self.advance()
            self.expect_keyword("by")
            order_by.append(self.parse_order_item())
            while self.peek().kind == "COMMA":
                self.advance()
                order_by.append(self.parse_order_item())

        limit = None
        if self.at_keyword("limit"):
            self.advance()
            tok = self.expect("NUMBER", "an integer LIMIT")
            if "." in tok.value:
                raise SqlSyntaxError("LIMIT must be an integer", tok.pos)
            limit = int(tok.value)

        if self.peek().kind == "SEMI":
            self.advance()
        trailing = self.peek()
        if trailing.kind != "EOF":
            raise SqlSyntaxError(
                "only a single statement is allowed", trailing.pos
            )
        end = trailing.pos
        return SelectStatement(
            projections=projections,
            from_table=from_table,
            joins=joins,
            where=where,
            group_by=group_by,
            having=having,
            order_by=order_by,
            limit=limit,
            span=Span(start, end),
        )

    # -- clauses ------------------------------------------------------------

    def parse_projections(self) -> list[Projection]:
        items = [self.parse_projection()]
        while self.peek().kind == "COMMA":
            self.advance()
            items.append(self.parse_projection())
        return items

    def parse_projection(self) -> Projection:
        tok = self.peek()
        if tok.kind == "STAR":
            self.advance()
            return Projection(Star(Span(tok.pos, tok.pos + 1)), None, Span(tok.pos, tok.pos + 1))
        expr = self.parse_value_expr()
        alias = self.parse_optional_alias()
        return Projection(expr, alias, Span(tok.pos, self.prev_end()))

    def parse_optional_alias(self) -> str | None:
        if self.at_keyword("as"):
            self.advance()
            return self.expect("IDENT", "an alias identifier").value
        if self.peek().kind == "IDENT":
            return self.advance().value
        return None

    def parse_table_ref(self) -> TableRef:
        tok = self.expect("IDENT", "a table name")
        alias = self.parse_optional_alias()
        return TableRef(tok.value, alias, Span(tok.pos, self.prev_end()))

    def parse_join(self) -> Join:
        tok = self.peek()
        kind = "INNER"
        if self.at_keyword("inner"):
            self.advance()
        elif self.at_keyword("left"):
            self.advance()
            kind = "LEFT"
        self.expect_keyword("join")
        table = self.parse_table_ref()
        self.expect_keyword("on")
        condition = self.parse_expr()
        return Join(kind, table, condition, Span(tok.pos, self.prev_end()))

    def parse_order_item(self) -> OrderItem:
        expr = self.parse_value_expr()
        if isinstance(expr, Literal):
            raise SqlSyntaxError("ORDER BY must name a column or aggregate", self.prev_pos())
        direction = None
        if self.at_keyword("asc"):
            self.advance()
            direction = "ASC"
        elif self.at_keyword("desc"):
            self.advance()
            direction = "DESC"
        return OrderItem(expr, direction)

    # -- expressions ----------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def parse_or(self) -> Expr:
        items = [self.parse_and()]
        while self.at_keyword("or"):
            self.advance()
            items.append(self.parse_and())
        return items[0] if len(items) == 1 else OrExpr(items)

    def parse_and(self) -> Expr:
        items = [self.parse_unary()]
        while self.at_keyword("and"):
            self.advance()
            items.append(self.parse_unary())
        return items[0] if len(items) == 1 else AndExpr(items)

    def parse_unary(self) -> Expr:
        if self.at_keyword("not"):
            tok = self.advance()
            return NotExpr(self.parse_unary(), Span(tok.pos, self.prev_end()))
        if self.peek().kind == "LPAREN":
            self.advance()
            inner = self.parse_expr()
            self.expect("RPAREN", "a closing parenthesis")
            return inner
        return self.parse_predicate()

    def parse_predicate(self) -> Expr:
        start = self.peek().pos
        operand = self.parse_value_expr()

        negated = False
        if self.at_keyword("not"):
            self.advance()
            negated = True
            if not self.at_keyword("in", "like", "between"):
                tok = self.peek()
                raise SqlSyntaxError(
                    "expected IN, LIKE, or BETWEEN after NOT", tok.pos
                )

        tok = self.peek()
        if tok.kind == "OP":
            op = self.advance().value
            right = self.parse_value_expr()
            return Comparison(op, operand, right, Span(start, self.prev_end()))
        if self.at_keyword("in"):
            self.advance()
            self.expect("LPAREN", "an opening parenthesis")
            items = [self.parse_literal()]
            while self.peek().kind == "COMMA":
                self.advance()
                items.append(self.parse_literal())
            self.expect("RPAREN", "a closing parenthesis")
            return InPredicate(operand, items, negated, Span(start, self.prev_end()))
        if self.at_keyword("like"):
            self.advance()
            pattern = self.parse_literal()
            if pattern.kind != "string":
                raise SqlSyntaxError("LIKE pattern must be a string", pattern.span.start)
            return LikePredicate(operand, pattern, negated, Span(start, self.prev_end()))
        if self.at_keyword("between"):
            self.advance()
            low = self.parse_literal()
            self.expect_keyword("and")
            high = self.parse_literal()
            return BetweenPredicate(operand, low, high, negated, Span(start, self.prev_end()))
        if self.at_keyword("is"):
            self.advance()
            is_negated = False
            if self.at_keyword("not"):
                self.advance()
                is_negated = True
            self.expect_keyword("null")
            return IsNullPredicate(operand, is_negated, Span(start, self.prev_end()))
        raise SqlSyntaxError(
            f"expected a comparison, found {tok.value or 'end of input'!r}", tok.pos
        )

    def parse_value_expr(self):
        """A column reference, a literal, or a function call."""
        tok = self.peek()
        if tok.kind in ("STRING", "NUMBER", "MINUS"):
            return self.parse_literal()
        if tok.kind == "IDENT" or (tok.kind == "KEYWORD" and self.peek(1).kind == "LPAREN"):
            if self.peek(1).kind == "LPAREN":
                return self.parse_function_call()
            return self.parse_column_ref()
        raise SqlSyntaxError(
            f"expected a column, literal, or function, found {tok.value or 'end of input'!r}",
            tok.pos,
        )

    def parse_function_call(self) -> FunctionCall:
        name_tok = self.advance()
        self.expect("LPAREN", "an opening parenthesis")
        arg: ColumnRef | Star | None
        tok = self.peek()
        if tok.kind == "STAR":
            self.advance()
            arg = Star(Span(tok.pos, tok.pos + 1))
        else:
            arg = self.parse_column_ref()
        self.expect("RPAREN", "a closing parenthesis")
        return FunctionCall(name_tok.value, arg, Span(name_tok.pos, self.prev_end()))

    def parse_column_ref(self) -> ColumnRef:
        tok = self.expect("IDENT", "a column name")
        if self.peek().kind == "DOT":
            self.advance()
            col = self.expect("IDENT", "a column name after '.'")
            return ColumnRef(tok.value, col.value, Span(tok.pos, col.pos + len(col.value)))
        return ColumnRef(None, tok.value, Span(tok.pos, tok.pos + len(tok.value)))

    def parse_literal(self) -> Literal:
        tok = self.peek()
        if tok.kind == "STRING":
            self.advance()
            return Literal(tok.value, "string", Span(tok.pos, self.prev_end()))
        negative = False
        if tok.kind == "MINUS":
            self.advance()
            negative = True
            tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            value: int | float
            value = float(tok.value) if "." in tok.value else int(tok.value)
            if negative:
                value = -value
            return Literal(value, "number", Span(tok.pos, self.prev_end()))
        raise SqlSyntaxError(
            f"expected a literal, found {tok.value or 'end of input'!r}", tok.pos
        )

    def prev_end(self) -> int:
        prev = self.tokens[self.pos - 1] if self.pos > 0 else self.tokens[0]
        return prev.pos + len(prev.value)

    def prev_pos(self) -> int:
        prev = self.tokens[self.pos - 1] if self.pos > 0 else self.tokens[0]
        return prev.pos


def parse_sql(text: str) -> SelectStatement:
    if not text or not text.strip():
        raise SqlSyntaxError("empty statement", 0)
    return _Parser(text).parse_statement()
