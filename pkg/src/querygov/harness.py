"""Ablation harness: run a labeled corpus in 0-shot and 5-shot modes.

The two modes differ only in how many retrieved examples reach the prompt;
everything else (catalog, store, provider, corpus) is held fixed, so metric
deltas isolate the contribution of example retrieval.
"""

from __future__ import annotations

from dataclasses import dataclass

from .sampledata import ANALYST_TOKEN, DeskCase, build_demo_service
from .service.metrics import MetricsReport, compute_metrics


@dataclass(frozen=True)
class AblationResult:
    reports: dict[str, MetricsReport]

    def summary_lines(self) -> list[str]:
        lines = []
        for mode, report in sorted(self.reports.items()):
            lines.append(
                f"{mode}: validity={_fmt(report.validity_rate)} "
                f"schema={_fmt(report.schema_compliance_rate)} "
                f"semantic={_fmt(report.semantic_accuracy)} "
                f"median_ms={report.median_latency_ms}"
            )
        return lines


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value * 100:.1f}%"


def run_mode(
    workdir,
    cases: list[DeskCase] | None,
    *,
    provider,
    examples_k: int,
    timeout_s: float = 60.0,
) -> MetricsReport:
    service, desk = build_demo_service(
        workdir, provider=provider, examples_k=examples_k
    )
    cases = cases if cases is not None else desk
    try:
        job_ids: dict[str, str] = {}
        for case in cases:
            job_ids[case.case_id] = service.submit_query(
                case.question, case.language, ANALYST_TOKEN
            )
        results = {}
        labels = {}
        for case in cases:
            job = service.wait(job_ids[case.case_id], timeout_s)
            labels[job.job_id] = [list(r) for r in case.expected_rows]
            if job.result is not None:
                results[job.job_id] = job.result
        events = service.audit_log.events()
        return compute_metrics(events, results_by_job=results, labels_by_job=labels)
    finally:
        service.shutdown()


def run_ablation(
    base_workdir,
    *,
    provider_factory,
    modes: tuple[int, ...] = (0, 5),
    cases: list[DeskCase] | None = None,
) -> AblationResult:
    """Run every mode with a fresh service and provider; returns per-mode metrics.

    ``provider_factory()`` must build a fresh provider per mode so call
    counters and scripted state never leak across modes.
    """
    from pathlib import Path

    reports: dict[str, MetricsReport] = {}
    for mode in modes:
        workdir = Path(base_workdir) / f"mode-{mode}shot"
        report = run_mode(
            workdir, cases, provider=provider_factory(), examples_k=mode
        )
        reports[f"{mode}-shot"] = report
    return AblationResult(reports)
