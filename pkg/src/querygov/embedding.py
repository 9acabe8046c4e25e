"""Embedding provider interface with a deterministic feature-hashing fallback.

The fallback hashes character 3-grams of the folded text into D signed
buckets and L2-normalizes; it needs no model weights and is a pure function
of its input, which is what the retrieval tests and the demo pipeline run on.
"""

from __future__ import annotations

import hashlib
import json
import urllib.request
from typing import Protocol

import numpy as np

from .textnorm import fold_key

DEFAULT_DIMENSION = 1536


class EmbeddingError(ValueError):
    pass


class EmbeddingProvider(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


def embed_fallback(text: str, dimension: int = DEFAULT_DIMENSION) -> np.ndarray:
    """Feature-hash char 3-grams into a unit-norm float32 vector."""
    folded = fold_key(text)
    if not folded:
        raise EmbeddingError("cannot embed empty text")
    grams = (
        [folded]
        if len(folded) < 3
        else [folded[i : i + 3] for i in range(len(folded) - 2)]
    )
    vec = np.zeros(dimension, dtype=np.float64)
    for gram in grams:
        digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
        h = int.from_bytes(digest, "big")
        sign = 1.0 if h & 1 else -1.0
        vec[(h >> 1) % dimension] += sign
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        # Signed collisions cancelled everything; fall back to one hot bucket.
        vec[0] = 1.0
        norm = 1.0
    return (vec / norm).astype(np.float32)


class HashingEmbedder:
    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        return embed_fallback(text, self.dimension)


class HttpEmbeddingProvider:
    """Adapter for a hosted embedding endpoint.

    Wire format: POST ``{"text": ...}``, response ``{"embedding": [...]}``.
    """

    def __init__(self, endpoint: str, dimension: int = DEFAULT_DIMENSION, timeout: float = 30.0):
        self.endpoint = endpoint
        self.dimension = dimension
        self.timeout = timeout

    def embed(self, text: str) -> np.ndarray:
        payload = json.dumps({"text": text}).encode("utf-8")
        req = urllib.request.Request(
            self.endpoint, data=payload, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                body = json.loads(resp.read().decode("utf-8"))
        except Exception as exc:
            raise EmbeddingError(f"embedding service failed: {exc}") from exc
        vec = np.asarray(body["embedding"], dtype=np.float32)
        if vec.shape != (self.dimension,):
            raise EmbeddingError(
                f"embedding dimension mismatch: got {vec.shape}, want ({self.dimension},)"
            )
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise EmbeddingError("embedding service returned a zero vector")
        return vec / norm


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))
