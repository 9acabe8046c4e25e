"""Validated question/SQL example corpus with exact and approximate search.

Exact mode is a brute-force cosine scan (the corpus is hundreds of entries;
a linear scan is microseconds). Approximate mode hashes vectors with random
hyperplane signatures across several tables, expanding the probe radius
until enough candidates are found, then reranks candidates exactly.

Every pair is guard-validated at insertion, so "validated" is an enforced
property of the corpus rather than a naming convention.
"""

from __future__ import annotations

import base64
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

NORM_TOLERANCE = 1e-6


class CorpusError(ValueError):
    pass


class CorpusFormatError(CorpusError):
    """Corpus file is corrupt; no partial index is produced."""


@dataclass(frozen=True)
class ExamplePair:
    example_id: str
    question_text: str
    sql_text: str
    language_of_origin: str
    embedding: np.ndarray = field(compare=False)
    validated_at: str = ""

    def __post_init__(self):
        norm = float(np.linalg.norm(self.embedding))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise CorpusError(
                f"example {self.example_id!r}: embedding norm {norm} is not 1"
            )


class _HyperplaneLsh:
    def __init__(self, dimension: int, bits: int = 8, tables: int = 24, seed: int = 97):
        rng = np.random.default_rng(seed)
        self.planes = rng.standard_normal((tables, bits, dimension)).astype(np.float32)
        self.tables = tables
        self.bits = bits
        self.buckets: list[dict[int, list[str]]] = [dict() for _ in range(tables)]

    def _signatures(self, vector: np.ndarray) -> list[int]:
        sigs = []
        for t in range(self.tables):
            projected = self.planes[t] @ vector
            sig = 0
            for bit_value in projected >= 0:
                sig = (sig << 1) | int(bit_value)
            sigs.append(sig)
        return sigs

    def add(self, example_id: str, vector: np.ndarray) -> None:
        for t, sig in enumerate(self._signatures(vector)):
            self.buckets[t].setdefault(sig, []).append(example_id)

    def candidates(self, vector: np.ndarray, min_candidates: int) -> set[str]:
        sigs = self._signatures(vector)
        found: set[str] = set()
        for radius in range(3):  # exact bucket, 1-bit flips, 2-bit flips
            for t, sig in enumerate(sigs):
                for probe in self._probes(sig, radius):
                    found.update(self.buckets[t].get(probe, ()))
            if len(found) >= min_candidates:
                break
        return found

    def _probes(self, sig: int, radius: int) -> list[int]:
        if radius == 0:
            return [sig]
        if radius == 1:
            return [sig ^ (1 << i) for i in range(self.bits)]
        probes = []
        for i in range(self.bits):
            for j in range(i + 1, self.bits):
                probes.append(sig ^ (1 << i) ^ (1 << j))
        return probes


class VectorIndex:
    """Example corpus keyed by example_id.

    Reads are lock-free on a snapshot; writes serialize behind a single lock
    and atomically swap the matrix cache, so a concurrent retrieval sees
    either the pre- or post-write corpus.
    """

    def __init__(
        self,
        dimension: int,
        mode: str = "exact",
        validator: Callable[[str], None] | None = None,
    ):
        if mode not in ("exact", "approximate"):
            raise CorpusError(f"unknown search mode {mode!r}")
        self.dimension = dimension
        self.mode = mode
        self.validator = validator
        self._entries: dict[str, ExamplePair] = {}
        self._lock = threading.Lock()
        self._snapshot: tuple[list[str], np.ndarray] | None = None
        self._lsh: _HyperplaneLsh | None = None

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> list[ExamplePair]:
        return sorted(self._entries.values(), key=lambda p: p.example_id)

    def get(self, example_id: str) -> ExamplePair | None:
        return self._entries.get(example_id)

    def add(self, pair: ExamplePair) -> None:
        if pair.embedding.shape != (self.dimension,):
            raise CorpusError(
                f"dimension mismatch: example {pair.example_id!r} has "
                f"{pair.embedding.shape}, index wants ({self.dimension},)"
            )
        if self.validator is not None:
            self.validator(pair.sql_text)
        with self._lock:
            self._entries[pair.example_id] = pair
            self._snapshot = None
            self._lsh = None

    def _current(self) -> tuple[list[str], np.ndarray]:
        # Similarities are computed in float64 so ordering is reproducible
        # against a per-entry dot-product scan.
        snap = self._snapshot
        if snap is None:
            with self._lock:
                ids = sorted(self._entries)
                if ids:
                    matrix = np.stack(
                        [self._entries[i].embedding for i in ids]
                    ).astype(np.float64)
                else:
                    matrix = np.zeros((0, self.dimension), dtype=np.float64)
                snap = (ids, matrix)
                self._snapshot = snap
        return snap

    def _current_lsh(self) -> _HyperplaneLsh:
        lsh = self._lsh
        if lsh is None:
            with self._lock:
                lsh = _HyperplaneLsh(self.dimension)
                for example_id, pair in self._entries.items():
                    lsh.add(example_id, pair.embedding)
                self._lsh = lsh
        return lsh

    def retrieve(
        self, query_embedding: np.ndarray, k: int = 5
    ) -> list[tuple[ExamplePair, float]]:
        if k < 1:
            raise CorpusError("k must be >= 1")
        if query_embedding.shape != (self.dimension,):
            raise CorpusError(
                f"dimension mismatch: query has {query_embedding.shape}, "
                f"index wants ({self.dimension},)"
            )
        ids, matrix = self._current()
        if not ids:
            return []
        if self.mode == "approximate":
            candidate_ids = sorted(
                self._current_lsh().candidates(query_embedding, min_candidates=4 * k)
            )
            if candidate_ids:
                ids = candidate_ids
                matrix = np.stack(
                    [self._entries[i].embedding for i in ids]
                ).astype(np.float64)
        sims = matrix @ query_embedding.astype(np.float64)
        order = sorted(range(len(ids)), key=lambda i: (-float(sims[i]), ids[i]))
        return [
            (self._entries[ids[i]], float(sims[i]))
            for i in order[: min(k, len(ids))]
        ]


def index_add(index: VectorIndex, pair: ExamplePair) -> VectorIndex:
    index.add(pair)
    return index


def retrieve_topk(
    index: VectorIndex, query_embedding: np.ndarray, k: int = 5
) -> list[tuple[ExamplePair, float]]:
    return index.retrieve(query_embedding, k)


def _encode_vector(vec: np.ndarray) -> str:
    return base64.b64encode(vec.astype("<f4").tobytes()).decode("ascii")


def _decode_vector(data: str, dimension: int) -> np.ndarray:
    raw = base64.b64decode(data.encode("ascii"), validate=True)
    vec = np.frombuffer(raw, dtype="<f4")
    if vec.shape != (dimension,):
        raise CorpusFormatError(
            f"vector has {vec.shape[0]} components, expected {dimension}"
        )
    return vec.copy()


def persist_corpus(index: VectorIndex, path: str | Path) -> None:
    """One JSON record per line; written to a temp file then renamed."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"dimension": index.dimension, "mode": index.mode}) + "\n")
        for pair in index.entries():
            fh.write(
                json.dumps(
                    {
                        "example_id": pair.example_id,
                        "question": pair.question_text,
                        "sql": pair.sql_text,
                        "language": pair.language_of_origin,
                        "validated_at": pair.validated_at,
                        "vector": _encode_vector(pair.embedding),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    tmp.replace(path)


def load_corpus(
    path: str | Path,
    validator: Callable[[str], None] | None = None,
    mode: str | None = None,
) -> VectorIndex:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusFormatError(f"cannot read corpus {path}: {exc}") from exc
    if not lines:
        raise CorpusFormatError(f"{path}: empty corpus file (missing header)")
    try:
        header = json.loads(lines[0])
        dimension = int(header["dimension"])
        file_mode = header.get("mode", "exact")
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CorpusFormatError(f"{path}:1: bad corpus header: {exc}") from exc

    pairs: list[ExamplePair] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            pairs.append(
                ExamplePair(
                    example_id=doc["example_id"],
                    question_text=doc["question"],
                    sql_text=doc["sql"],
                    language_of_origin=doc["language"],
                    embedding=_decode_vector(doc["vector"], dimension),
                    validated_at=doc.get("validated_at", ""),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, CorpusError) as exc:
            raise CorpusFormatError(f"{path}:{lineno}: bad corpus record: {exc}") from exc

    index = VectorIndex(dimension, mode=mode or file_mode, validator=validator)
    for pair in pairs:
        index.add(pair)
    return index
