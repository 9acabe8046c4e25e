"""Metric definitions over audit windows.

Validity is guard-pass over total; schema compliance is non-schema-rejected
over parsed; failure categories follow the ambiguous / schema-misalignment /
policy-blocked taxonomy. Semantic accuracy is only computed when a labeled
answer set is supplied alongside the executed results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..results import ResultTable
from .audit import AuditEvent


@dataclass
class MetricsReport:
    total_jobs: int = 0
    guard_passed: int = 0
    parsed: int = 0
    schema_compliant: int = 0
    validity_rate: float | None = None
    schema_compliance_rate: float | None = None
    median_latency_ms: float | None = None
    p95_latency_ms: float | None = None
    failure_categories: dict[str, int] = field(default_factory=dict)
    semantic_total: int = 0
    semantic_matches: int = 0
    semantic_accuracy: float | None = None

    def to_dict(self) -> dict:
        return {
            "total_jobs": self.total_jobs,
            "guard_passed": self.guard_passed,
            "parsed": self.parsed,
            "schema_compliant": self.schema_compliant,
            "validity_rate": self.validity_rate,
            "schema_compliance_rate": self.schema_compliance_rate,
            "median_latency_ms": self.median_latency_ms,
            "p95_latency_ms": self.p95_latency_ms,
            "failure_categories": dict(self.failure_categories),
            "semantic_total": self.semantic_total,
            "semantic_matches": self.semantic_matches,
            "semantic_accuracy": self.semantic_accuracy,
        }


def _percentile(values: list[float], fraction: float) -> float:
    ordered = sorted(values)
    if not ordered:
        raise ValueError("no values")
    rank = max(1, round(fraction * len(ordered)))
    return ordered[rank - 1]


def rows_match(result: ResultTable, expected_rows: list[list[str]]) -> bool:
    return [list(r) for r in result.rows] == [list(r) for r in expected_rows]


def compute_metrics(
    events: list[AuditEvent],
    window: tuple[str, str] | None = None,
    results_by_job: dict[str, ResultTable] | None = None,
    labels_by_job: dict[str, list[list[str]]] | None = None,
) -> MetricsReport:
    terminal = [e for e in events if e.phase == "terminal"]
    if window is not None:
        start, end = window
        terminal = [e for e in terminal if start <= e.timestamp <= end]

    report = MetricsReport(total_jobs=len(terminal))
    if not terminal:
        return report

    latencies: list[float] = []
    for event in terminal:
        verdict = event.payload.get("verdict_code", "none")
        if verdict == "pass":
            report.guard_passed += 1
        if verdict in ("pass", "reject_schema", "reject_policy"):
            report.parsed += 1
            if verdict != "reject_schema":
                report.schema_compliant += 1
        category = event.payload.get("category", "none")
        if category != "none":
            report.failure_categories[category] = (
                report.failure_categories.get(category, 0) + 1
            )
        duration = event.payload.get("duration_ms")
        if duration is not None:
            latencies.append(float(duration))

    report.validity_rate = report.guard_passed / report.total_jobs
    if report.parsed:
        report.schema_compliance_rate = report.schema_compliant / report.parsed
    if latencies:
        report.median_latency_ms = _percentile(latencies, 0.5)
        report.p95_latency_ms = _percentile(latencies, 0.95)

    if labels_by_job:
        results_by_job = results_by_job or {}
        for job_id, expected in labels_by_job.items():
            report.semantic_total += 1
            result = results_by_job.get(job_id)
            if result is not None and rows_match(result, expected):
                report.semantic_matches += 1
        if report.semantic_total:
            report.semantic_accuracy = (
                report.semantic_matches / report.semantic_total
            )
    return report
