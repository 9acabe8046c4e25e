"""Query-job lifecycle: submit, run through the pipeline phases, poll, audit.

Jobs run on a thread pool; submission returns immediately with the job in
``loading``. Status transitions follow the strict order loading ->
generating_query -> executing_query -> translating -> ready, with ``error``
reachable from any non-terminal state. Every transition lands in the audit
log before the job moves on.
"""

from __future__ import annotations

import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..catalog import SchemaCatalog
from ..engine import (
    REFUSAL_MESSAGE,
    EngineError,
    PromptTemplate,
    assemble_prompt,
    generate_sql,
    preprocess_question,
    question_matches_forbidden,
    translate_question,
    translate_result,
)
from ..guard import run_guard
from ..guard.verdict import VerdictStatus
from ..results import ResultTable
from ..retrieval import VectorIndex
from .audit import AuditEvent, hash_text, record_audit
from .config import ServiceConfig
from .executor import (
    AccessDenied,
    AnalyticsStore,
    ExecutionTimeout,
    execute_statement,
    result_header_types,
)
from .sessions import SessionRegistry

LIFECYCLE = ("loading", "generating_query", "executing_query", "translating", "ready")
_ORDER = {status: i for i, status in enumerate(LIFECYCLE)}

CATEGORY_AMBIGUOUS = "ambiguous"
CATEGORY_SCHEMA = "schema_misalignment"
CATEGORY_POLICY = "policy_blocked"
CATEGORY_TECHNICAL = "technical_error"


class SessionError(PermissionError):
    pass


class JobNotFound(KeyError):
    pass


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass
class QueryJob:
    job_id: str
    session_token: str
    question: str
    language_hint: str | None
    created_at: str
    status: str = "loading"
    detected_language: str = ""
    transitions: list[tuple[str, str]] = field(default_factory=list)
    retrieved_example_ids: list[str] = field(default_factory=list)
    generated_sql: str | None = None
    verdict_code: str = "none"
    result: ResultTable | None = None
    refusal: str | None = None
    error_category: str | None = None
    error_message: str | None = None
    timings: dict[str, float] = field(default_factory=dict)
    provider_seconds: float = 0.0
    attempts: int = 0
    audit_degraded: bool = False

    @property
    def terminal(self) -> bool:
        return self.status in ("ready", "error")

    def summary(self, preview_rows: int = 10) -> dict:
        preview = None
        if self.result is not None:
            preview = {
                "headers": [list(h) for h in self.result.headers],
                "rows": [list(r) for r in self.result.rows[:preview_rows]],
                "truncated": self.result.truncated
                or len(self.result.rows) > preview_rows,
            }
        return {
            "job_id": self.job_id,
            "question": self.question,
            "status": self.status,
            "detected_language": self.detected_language,
            "generated_sql": self.generated_sql,
            "verdict_code": self.verdict_code,
            "refusal": self.refusal,
            "error_category": self.error_category,
            "created_at": self.created_at,
            "result_preview": preview,
        }


class _TimedProvider:
    """Wraps the provider so provider time can be excluded from pipeline latency."""

    def __init__(self, inner):
        self.inner = inner
        self.seconds = 0.0

    def complete(self, prompt: str) -> str:
        start = time.monotonic()
        try:
            return self.inner.complete(prompt)
        finally:
            self.seconds += time.monotonic() - start


class QueryService:
    def __init__(
        self,
        *,
        catalog: SchemaCatalog,
        index: VectorIndex,
        embedder,
        translator,
        provider,
        store: AnalyticsStore,
        audit_log,
        sessions: SessionRegistry,
        template: PromptTemplate,
        config: ServiceConfig | None = None,
    ):
        self.catalog = catalog
        self.index = index
        self.embedder = embedder
        self.translator = translator
        self.provider = provider
        self.store = store
        self.audit_log = audit_log
        self.sessions = sessions
        self.template = template
        self.config = config or ServiceConfig()
        self._jobs: dict[str, QueryJob] = {}
        self._lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=self.config.workers)

    # -- public API -----------------------------------------------------

    def submit_query(
        self,
        question: str,
        language_hint: str | None = None,
        session_token: str = "",
    ) -> str:
        session = self.sessions.resolve(session_token)
        if session is None or not session.may_query:
            raise SessionError("invalid session")
        if not question or not question.strip():
            raise ValueError("question is empty")
        job = QueryJob(
            job_id=uuid.uuid4().hex,
            session_token=session_token,
            question=question,
            language_hint=language_hint,
            created_at=_now_iso(),
        )
        job.transitions.append(("loading", job.created_at))
        with self._lock:
            self._jobs[job.job_id] = job
        self._audit(job, "loading", {"question_hash": hash_text(question)})
        self._pool.submit(self._run_job, job, session)
        return job.job_id

    def get_status(self, job_id: str, session_token: str) -> dict:
        job = self._owned_job(job_id, session_token)
        with self._lock:
            return {
                "job_id": job.job_id,
                "status": job.status,
                "timings": dict(job.timings),
                "transitions": list(job.transitions),
            }

    def get_result(self, job_id: str, session_token: str) -> dict:
        job = self._owned_job(job_id, session_token)
        with self._lock:
            payload = {
                "job_id": job.job_id,
                "status": job.status,
                "generated_sql": job.generated_sql,
                "verdict_code": job.verdict_code,
                "refusal": job.refusal,
                "error_category": job.error_category,
                "error_message": job.error_message,
            }
            table = job.result if job.result is not None else ResultTable.empty()
            payload.update(table.to_payload())
            return payload

    def get_history(self, session_token: str, limit: int = 20) -> list[dict]:
        session = self.sessions.resolve(session_token)
        if session is None:
            raise SessionError("invalid session")
        with self._lock:
            jobs = [
                job
                for job in self._jobs.values()
                if job.session_token == session_token and job.terminal
            ]
        jobs.sort(key=lambda j: j.created_at, reverse=True)
        return [job.summary() for job in jobs[: max(0, limit)]]

    def wait(self, job_id: str, timeout_s: float = 30.0) -> QueryJob:
        """Testing/CLI helper: block until the job reaches a terminal state."""
        deadline = time.monotonic() + timeout_s
        while time.monotonic() < deadline:
            with self._lock:
                job = self._jobs.get(job_id)
                if job is None:
                    raise JobNotFound(job_id)
                if job.terminal:
                    return job
            time.sleep(0.005)
        raise TimeoutError(f"job {job_id} did not finish within {timeout_s}s")

    def job(self, job_id: str) -> QueryJob:
        with self._lock:
            if job_id not in self._jobs:
                raise JobNotFound(job_id)
            return self._jobs[job_id]

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)

    # -- internals -------------------------------------------------------

    def _owned_job(self, job_id: str, session_token: str) -> QueryJob:
        session = self.sessions.resolve(session_token)
        if session is None:
            raise SessionError("invalid session")
        with self._lock:
            job = self._jobs.get(job_id)
        # Cross-session access reads as not-found so job ids cannot be probed.
        if job is None or job.session_token != session_token:
            raise JobNotFound(job_id)
        return job

    def _transition(self, job: QueryJob, status: str) -> None:
        with self._lock:
            if job.status in ("ready", "error"):
                raise RuntimeError(f"job {job.job_id} is already terminal")
            if status in _ORDER and job.status in _ORDER:
                if _ORDER[status] <= _ORDER[job.status]:
                    raise RuntimeError(
                        f"illegal transition {job.status} -> {status}"
                    )
            job.status = status
            job.transitions.append((status, _now_iso()))
        self._audit(job, status, {})

    @contextmanager
    def _phase(self, job: QueryJob, status: str):
        if status != "loading":  # jobs are created in loading
            self._transition(job, status)
        start = time.monotonic()
        yield
        job.timings[status] = time.monotonic() - start

    def _audit(self, job: QueryJob, phase: str, payload: dict) -> None:
        event = AuditEvent(job.session_token, job.job_id, phase, _now_iso(), payload)
        if not record_audit(self.audit_log, event):
            job.audit_degraded = True

    def _finish_error(
        self, job: QueryJob, category: str, message: str, refusal: str | None = None
    ) -> None:
        with self._lock:
            job.status = "error"
            job.error_category = category
            job.error_message = message
            job.refusal = refusal
            if job.result is None:
                job.result = ResultTable.empty()
            job.transitions.append(("error", _now_iso()))
        self._audit(job, "error", {"category": category})
        self._terminal_audit(job)

    def _finish_ready(self, job: QueryJob, table: ResultTable) -> None:
        with self._lock:
            job.status = "ready"
            job.result = table
            job.transitions.append(("ready", _now_iso()))
        self._audit(job, "ready", {"row_count": table.row_count})
        self._terminal_audit(job)

    def _terminal_audit(self, job: QueryJob) -> None:
        total = sum(job.timings.values())
        job.timings["total"] = total
        payload = {
            "question_hash": hash_text(job.question),
            "verdict_code": job.verdict_code,
            "row_count": job.result.row_count if job.result else 0,
            "duration_ms": int(total * 1000),
            "category": job.error_category or "none",
            "attempts": job.attempts,
        }
        if job.generated_sql:
            payload["sql_hash"] = hash_text(job.generated_sql)
        self._audit(job, "terminal", payload)

    def _run_job(self, job: QueryJob, session) -> None:
        cfg = self.config
        timed_provider = _TimedProvider(self.provider)
        try:
            with self._phase(job, "loading"):
                normalized, detected = preprocess_question(job.question)
                language = (
                    job.language_hint
                    if job.language_hint in ("tr", "ru", "en")
                    else detected
                )
                job.detected_language = language
                if question_matches_forbidden(normalized, self.catalog.policy):
                    job.verdict_code = VerdictStatus.REJECT_POLICY.value
                    self._finish_error(
                        job, CATEGORY_POLICY, "question touches restricted topics",
                        refusal=REFUSAL_MESSAGE,
                    )
                    return
                question_en = translate_question(
                    normalized, language, self.translator, self.catalog
                )
                if question_matches_forbidden(question_en, self.catalog.policy):
                    job.verdict_code = VerdictStatus.REJECT_POLICY.value
                    self._finish_error(
                        job, CATEGORY_POLICY, "question touches restricted topics",
                        refusal=REFUSAL_MESSAGE,
                    )
                    return
                examples: list[tuple[str, str]] = []
                if cfg.examples_k > 0 and len(self.index) > 0:
                    hits = self.index.retrieve(
                        self.embedder.embed(question_en), cfg.examples_k
                    )
                    job.retrieved_example_ids = [p.example_id for p, _ in hits]
                    examples = [(p.question_text, p.sql_text) for p, _ in hits]
                bundle = assemble_prompt(
                    self.catalog,
                    self.catalog.policy,
                    examples,
                    question_en,
                    self.template,
                    cfg.token_budget,
                )

            with self._phase(job, "generating_query"):
                outcome, guard_outcome = generate_sql(
                    bundle,
                    timed_provider,
                    self.template,
                    validate=lambda sql: run_guard(sql, self.catalog, question_en),
                    policy=self.catalog.policy,
                    max_attempts=cfg.max_attempts,
                )
                job.attempts = outcome.attempts
                job.provider_seconds = timed_provider.seconds
                if outcome.refusal is not None and outcome.attempts == 0:
                    job.verdict_code = VerdictStatus.REJECT_POLICY.value
                    self._finish_error(
                        job, CATEGORY_POLICY, "question touches restricted topics",
                        refusal=REFUSAL_MESSAGE,
                    )
                    return
                if outcome.refusal is not None:
                    self._finish_error(
                        job, CATEGORY_AMBIGUOUS,
                        "unable to generate valid query: provider returned no SQL",
                    )
                    return
                job.generated_sql = outcome.extracted_sql
                assert guard_outcome is not None
                job.verdict_code = guard_outcome.verdict.status.value
                if not guard_outcome.passed:
                    status = guard_outcome.verdict.status
                    if status == VerdictStatus.REJECT_POLICY:
                        self._finish_error(
                            job, CATEGORY_POLICY,
                            "generated SQL touches restricted topics",
                            refusal=REFUSAL_MESSAGE,
                        )
                    elif status == VerdictStatus.REJECT_SCHEMA:
                        self._finish_error(
                            job, CATEGORY_SCHEMA, "unable to generate valid query"
                        )
                    else:
                        self._finish_error(
                            job, CATEGORY_AMBIGUOUS, "unable to generate valid query"
                        )
                    return
                ast = guard_outcome.ast
                statement = guard_outcome.statement
                redactions = guard_outcome.verdict.planned_redactions

            with self._phase(job, "executing_query"):
                table = execute_statement(
                    statement,
                    self.store,
                    session,
                    referenced_tables={t.name for t in ast.tables()},
                    row_cap=cfg.row_cap,
                    timeout_s=cfg.statement_timeout_s,
                    redaction_labels=redactions,
                    header_types=result_header_types(ast, self.catalog),
                )

            with self._phase(job, "translating"):
                translated, _warn = translate_result(
                    table, job.detected_language, self.translator, self.catalog
                )

            self._finish_ready(job, translated)
        except AccessDenied as exc:
            job.provider_seconds = timed_provider.seconds
            self._finish_error(job, CATEGORY_TECHNICAL, f"access denied: {exc}")
        except ExecutionTimeout as exc:
            self._finish_error(job, CATEGORY_TECHNICAL, f"execution timeout: {exc}")
        except EngineError as exc:
            self._finish_error(job, CATEGORY_TECHNICAL, str(exc))
        except Exception as exc:  # defensive: a job must always terminate
            self._finish_error(job, CATEGORY_TECHNICAL, f"internal error: {exc}")
