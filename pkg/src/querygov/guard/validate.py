"""Whitelist validation: schema resolution, then safety policy.

check_schema resolves every table, column, and function against the catalog
and writes (table, column) bindings onto identifier nodes. check_policy
scans question text, identifiers, and literals for forbidden topic terms in
any supported language, and plans redactions for PII projections instead of
rejecting them. When both checks find problems, schema findings are listed
first but one verdict carries everything.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..catalog import PolicyRules, SchemaCatalog, TableDef
from ..textnorm import fold_text, fold_tokens
from .nodes import (
    AndExpr,
    ColumnRef,
    Comparison,
    FunctionCall,
    Literal,
    SelectStatement,
    Star,
    walk_expr,
)
from .parameterize import ParameterizedStatement, parameterize
from .parser import parse_sql
from .verdict import (
    Finding,
    SqlSyntaxError,
    ValidationVerdict,
    VerdictStatus,
)


def _scope(ast: SelectStatement, catalog: SchemaCatalog):
    """Resolve FROM/JOIN tables; returns (alias map, findings)."""
    findings: list[Finding] = []
    scope: dict[str, TableDef] = {}
    ordered: list[TableDef] = []
    for ref in ast.tables():
        table = catalog.table(ref.name)
        if table is None:
            findings.append(
                Finding("unknown-table", ref.span, f"unknown table {ref.name!r}")
            )
            continue
        key = fold_text(ref.alias or ref.name)
        if key in scope:
            findings.append(
                Finding(
                    "duplicate-alias",
                    ref.span,
                    f"duplicate table alias {ref.alias or ref.name!r}",
                )
            )
            continue
        scope[key] = table
        ordered.append(table)
    return scope, ordered, findings


def _resolve_column(
    col: ColumnRef,
    scope: dict[str, TableDef],
    findings: list[Finding],
    aliases: frozenset[str] = frozenset(),
) -> None:
    if col.qualifier is not None:
        table = scope.get(fold_text(col.qualifier))
        if table is None:
            findings.append(
                Finding(
                    "unknown-qualifier",
                    col.span,
                    f"unknown table or alias {col.qualifier!r}",
                )
            )
            return
        column = table.column(col.name)
        if column is None:
            findings.append(
                Finding(
                    "unknown-column",
                    col.span,
                    f"column {col.name!r} does not exist in table {table.name!r}",
                )
            )
            return
        col.binding = (table.name, column.name)
        return
    if fold_text(col.name) in aliases:
        return  # resolves to a projection alias (ORDER BY / GROUP BY)
    hits = []
    for table in scope.values():
        column = table.column(col.name)
        if column is not None:
            hits.append((table.name, column.name))
    unique = sorted(set(hits))
    if not unique:
        findings.append(
            Finding(
                "unknown-column",
                col.span,
                f"column {col.name!r} does not resolve in any table in scope",
            )
        )
    elif len(unique) > 1:
        findings.append(
            Finding(
                "ambiguous-column",
                col.span,
                f"column {col.name!r} is ambiguous across "
                + ", ".join(t for t, _ in unique),
            )
        )
    else:
        col.binding = unique[0]


def _join_condition_approved(condition) -> bool:
    """v1 approves ON conditions that equate catalog columns (AND of equalities)."""
    if isinstance(condition, AndExpr):
        return all(_join_condition_approved(item) for item in condition.items)
    return (
        isinstance(condition, Comparison)
        and condition.op == "="
        and isinstance(condition.left, ColumnRef)
        and isinstance(condition.right, ColumnRef)
    )


def check_schema(ast: SelectStatement, catalog: SchemaCatalog) -> ValidationVerdict:
    findings: list[Finding] = []
    scope, _, table_findings = _scope(ast, catalog)
    findings.extend(table_findings)

    alias_names = frozenset(
        fold_text(p.alias) for p in ast.projections if p.alias
    )

    if scope:
        for proj in ast.projections:
            if isinstance(proj.expr, ColumnRef):
                _resolve_column(proj.expr, scope, findings)
            elif isinstance(proj.expr, FunctionCall) and isinstance(
                proj.expr.arg, ColumnRef
            ):
                _resolve_column(proj.expr.arg, scope, findings)

        for join in ast.joins:
            if not _join_condition_approved(join.condition):
                findings.append(
                    Finding(
                        "unapproved-join",
                        join.span,
                        "join conditions must equate catalog columns",
                    )
                )
            for node in walk_expr(join.condition):
                _resolve_operands(node, scope, findings)

        if ast.where is not None:
            for node in walk_expr(ast.where):
                if _has_aggregate(node):
                    findings.append(
                        Finding(
                            "aggregate-in-where",
                            ast.span,
                            "aggregate functions are not allowed in WHERE",
                        )
                    )
                _resolve_operands(node, scope, findings)

        for col in ast.group_by:
            _resolve_column(col, scope, findings, alias_names)

        if ast.having is not None:
            for node in walk_expr(ast.having):
                _resolve_operands(node, scope, findings)

        for item in ast.order_by:
            if isinstance(item.expr, ColumnRef):
                _resolve_column(item.expr, scope, findings, alias_names)
            elif isinstance(item.expr, FunctionCall) and isinstance(
                item.expr.arg, ColumnRef
            ):
                _resolve_column(item.expr.arg, scope, findings)

    for call in _all_function_calls(ast):
        if not catalog.function_allowed(call.func):
            findings.append(
                Finding(
                    "function-not-allowed",
                    call.span,
                    f"function {call.func!r} is not whitelisted",
                )
            )

    status = VerdictStatus.REJECT_SCHEMA if findings else VerdictStatus.PASS
    return ValidationVerdict(status, findings)


def _resolve_operands(node, scope, findings) -> None:
    from .nodes import predicate_operands

    for operand, _ in predicate_operands(node):
        if isinstance(operand, ColumnRef):
            _resolve_column(operand, scope, findings)
        elif isinstance(operand, FunctionCall) and isinstance(operand.arg, ColumnRef):
            _resolve_column(operand.arg, scope, findings)


def _has_aggregate(node) -> bool:
    from .nodes import predicate_operands

    return any(
        isinstance(op, FunctionCall) for op, _ in predicate_operands(node)
    )


def _all_function_calls(ast: SelectStatement):
    from .nodes import iter_function_calls

    return iter_function_calls(ast)


def _identifier_tokens(name: str) -> set[str]:
    tokens = set(fold_tokens(name.replace("_", " ")))
    tokens.add(fold_text(name))
    return tokens


def check_policy(
    ast: SelectStatement,
    policy: PolicyRules,
    question_context: str = "",
) -> ValidationVerdict:
    findings: list[Finding] = []
    terms = policy.forbidden_terms_folded()

    if question_context:
        hits = sorted(set(fold_tokens(question_context)) & terms)
        if hits:
            findings.append(
                Finding(
                    "forbidden-topic-question",
                    ast.span,
                    "question touches restricted topics: " + ", ".join(hits),
                )
            )

    for col in _all_column_refs(ast):
        hits = sorted(_identifier_tokens(col.name) & terms)
        if hits:
            findings.append(
                Finding(
                    "forbidden-identifier",
                    col.span,
                    f"identifier {col.name!r} matches restricted terms: "
                    + ", ".join(hits),
                )
            )

    for proj in ast.projections:
        if proj.alias:
            hits = sorted(_identifier_tokens(proj.alias) & terms)
            if hits:
                findings.append(
                    Finding(
                        "forbidden-identifier",
                        proj.span,
                        f"alias {proj.alias!r} matches restricted terms: "
                        + ", ".join(hits),
                    )
                )

    for lit in _all_literals(ast):
        if lit.kind != "string":
            continue
        hits = sorted(set(fold_tokens(str(lit.value))) & terms)
        if hits:
            findings.append(
                Finding(
                    "forbidden-literal",
                    lit.span,
                    f"literal value matches restricted terms: " + ", ".join(hits),
                )
            )

    redactions = planned_redactions(ast, policy)
    status = VerdictStatus.REJECT_POLICY if findings else VerdictStatus.PASS
    return ValidationVerdict(status, findings, redactions if not findings else [])


def planned_redactions(ast: SelectStatement, policy: PolicyRules) -> list[str]:
    """Output-column labels whose cells must be replaced by the marker."""
    pii = policy.pii_redact_columns
    if not pii:
        return []
    table_keys = {fold_text(ref.name) for ref in ast.tables()}
    labels: list[str] = []
    for proj in ast.projections:
        if isinstance(proj.expr, Star):
            for qualified in sorted(pii):
                table_key, _, column_key = qualified.partition(".")
                if table_key in table_keys:
                    labels.append(column_key)
        elif isinstance(proj.expr, ColumnRef):
            binding = proj.expr.binding
            if binding is not None:
                key = f"{fold_text(binding[0])}.{fold_text(binding[1])}"
                if key in pii:
                    labels.append(proj.alias or proj.expr.name)
        elif isinstance(proj.expr, FunctionCall) and isinstance(
            proj.expr.arg, ColumnRef
        ):
            binding = proj.expr.arg.binding
            if binding is not None:
                key = f"{fold_text(binding[0])}.{fold_text(binding[1])}"
                if key in pii:
                    from .render import render_projection

                    labels.append(proj.alias or render_projection(proj))
    seen: set[str] = set()
    unique = []
    for label in labels:
        if fold_text(label) not in seen:
            seen.add(fold_text(label))
            unique.append(label)
    return unique


def _all_column_refs(ast: SelectStatement):
    from .nodes import iter_column_refs

    return iter_column_refs(ast)


def _all_literals(ast: SelectStatement):
    from .nodes import iter_literals

    return iter_literals(ast)


@dataclass
class GuardOutcome:
    verdict: ValidationVerdict
    ast: SelectStatement | None = None
    statement: ParameterizedStatement | None = None

    @property
    def passed(self) -> bool:
        return self.verdict.passed


def run_guard(
    sql_text: str,
    catalog: SchemaCatalog,
    question_context: str = "",
) -> GuardOutcome:
    """Parse, schema-check, policy-check, and parameterize in one pass.

    Schema and policy findings are combined into a single verdict with
    schema findings first; status reflects the earliest failing layer.
    """
    try:
        ast = parse_sql(sql_text)
    except SqlSyntaxError as exc:
        return GuardOutcome(exc.to_verdict())

    schema_verdict = check_schema(ast, catalog)
    policy_verdict = check_policy(ast, catalog.policy, question_context)

    findings = [*schema_verdict.findings, *policy_verdict.findings]
    if schema_verdict.findings:
        status = VerdictStatus.REJECT_SCHEMA
    elif policy_verdict.findings:
        status = VerdictStatus.REJECT_POLICY
    else:
        status = VerdictStatus.PASS
    verdict = ValidationVerdict(
        status,
        findings,
        policy_verdict.planned_redactions if status == VerdictStatus.PASS else [],
    )
    if not verdict.passed:
        return GuardOutcome(verdict, ast)
    return GuardOutcome(verdict, ast, parameterize(ast, catalog))
