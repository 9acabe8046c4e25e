"""Paths to the packaged sample-domain data files."""

from __future__ import annotations

import importlib.resources
from pathlib import Path


def data_path(name: str) -> Path:
    return Path(str(importlib.resources.files("querygov").joinpath("data", name)))
