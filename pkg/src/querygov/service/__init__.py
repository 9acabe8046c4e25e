"""Execution, job lifecycle, audit logging, metrics, and the HTTP API."""

from .audit import (
    AuditEvent,
    AuditValidationError,
    FileAuditLog,
    MemoryAuditLog,
    hash_text,
    record_audit,
)
from .config import ServiceConfig, load_config
from .executor import (
    AccessDenied,
    AnalyticsStore,
    ExecutionTimeout,
    create_schema,
    execute_statement,
    result_header_types,
)
from .jobs import LIFECYCLE, JobNotFound, QueryJob, QueryService, SessionError
from .metrics import MetricsReport, compute_metrics
from .sessions import SessionPermission, SessionRegistry

__all__ = [
    "AuditEvent",
    "AuditValidationError",
    "FileAuditLog",
    "MemoryAuditLog",
    "hash_text",
    "record_audit",
    "ServiceConfig",
    "load_config",
    "AccessDenied",
    "AnalyticsStore",
    "ExecutionTimeout",
    "create_schema",
    "execute_statement",
    "result_header_types",
    "LIFECYCLE",
    "JobNotFound",
    "QueryJob",
    "QueryService",
    "SessionError",
    "MetricsReport",
    "compute_metrics",
    "SessionPermission",
    "SessionRegistry",
]
