"""SELECT-only SQL guard: parse, whitelist-check, policy-check, parameterize."""

from .nodes import SelectStatement
from .parameterize import (
    Parameter,
    ParameterizedStatement,
    ParameterizeError,
    parameterize,
    render_inlined,
)
from .parser import parse_sql
from .redact import REDACTED_MARKER, redact_results
from .render import render_statement
from .validate import (
    GuardOutcome,
    check_policy,
    check_schema,
    planned_redactions,
    run_guard,
)
from .verdict import (
    EXIT_CODES,
    Finding,
    SqlSyntaxError,
    ValidationVerdict,
    VerdictStatus,
    pass_verdict,
)

__all__ = [
    "SelectStatement",
    "Parameter",
    "ParameterizedStatement",
    "ParameterizeError",
    "parameterize",
    "render_inlined",
    "parse_sql",
    "REDACTED_MARKER",
    "redact_results",
    "render_statement",
    "GuardOutcome",
    "check_policy",
    "check_schema",
    "planned_redactions",
    "run_guard",
    "EXIT_CODES",
    "Finding",
    "SqlSyntaxError",
    "ValidationVerdict",
    "VerdictStatus",
    "pass_verdict",
]
