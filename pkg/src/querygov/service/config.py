"""Service configuration: file-based with environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

_ENV_PREFIX = "QUERYGOV_"


@dataclass(frozen=True)
class ServiceConfig:
    catalog_path: str = ""
    corpus_path: str = ""
    dictionary_path: str = ""
    pipeline_config_path: str = ""
    prompt_template_path: str = ""
    store_path: str = ""
    source_store_path: str = ""
    audit_path: str = ""
    cursor_path: str = ""
    sessions_path: str = ""
    provider_endpoint: str = ""
    translation_endpoint: str = ""
    embedding_endpoint: str = ""
    embedding_dimension: int = 1536
    examples_k: int = 5
    token_budget: int = 8000
    max_attempts: int = 2
    row_cap: int = 1000
    statement_timeout_s: float = 15.0
    provider_timeout_s: float = 30.0
    sync_interval_hours: int = 72
    workers: int = 8


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    doc = {}
    if path is not None:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    config = ServiceConfig(**doc)
    env = dict(os.environ if env is None else env)
    overrides = {}
    for f in fields(ServiceConfig):
        key = _ENV_PREFIX + f.name.upper()
        if key in env:
            raw = env[key]
            if f.type in ("int", int):
                overrides[f.name] = int(raw)
            elif f.type in ("float", float):
                overrides[f.name] = float(raw)
            else:
                overrides[f.name] = raw
    return replace(config, **overrides)
