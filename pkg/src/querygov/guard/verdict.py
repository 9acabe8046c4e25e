"""Validation verdicts and the syntax-rejection exception."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .nodes import NO_SPAN, Span


class VerdictStatus(str, Enum):
    PASS = "pass"
    REJECT_SYNTAX = "reject_syntax"
    REJECT_SCHEMA = "reject_schema"
    REJECT_POLICY = "reject_policy"


EXIT_CODES = {
    VerdictStatus.PASS: 0,
    VerdictStatus.REJECT_SYNTAX: 1,
    VerdictStatus.REJECT_SCHEMA: 2,
    VerdictStatus.REJECT_POLICY: 3,
}


@dataclass(frozen=True)
class Finding:
    code: str
    span: Span
    message: str


@dataclass
class ValidationVerdict:
    status: VerdictStatus
    findings: list[Finding] = field(default_factory=list)
    planned_redactions: list[str] = field(default_factory=list)

    def __post_init__(self):
        if (self.status == VerdictStatus.PASS) != (not self.findings):
            raise ValueError("verdict status pass <=> findings empty")

    @property
    def passed(self) -> bool:
        return self.status == VerdictStatus.PASS

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_text(self) -> str:
        """Stable serialization for snapshots and the CLI."""
        lines = [f"verdict: {self.status.value}"]
        for f in self.findings:
            lines.append(f"  [{f.code}] at {f.span.start}..{f.span.end}: {f.message}")
        for label in self.planned_redactions:
            lines.append(f"  redact: {label}")
        return "\n".join(lines)


def pass_verdict(planned_redactions: list[str] | None = None) -> ValidationVerdict:
    return ValidationVerdict(
        VerdictStatus.PASS, [], planned_redactions or []
    )


class SqlSyntaxError(Exception):
    """Parse failure carrying the offending source position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position

    def to_verdict(self) -> ValidationVerdict:
        span = Span(self.position, self.position) if self.position >= 0 else NO_SPAN
        return ValidationVerdict(
            VerdictStatus.REJECT_SYNTAX,
            [Finding("syntax", span, self.message)],
        )
