"""Near-duplicate detection with minhash signatures and LSH banding.

Signatures are minimums of universal hash functions over character shingles;
records sharing any band bucket become candidates, and candidates whose
estimated Jaccard similarity clears the threshold are clustered with
union-find. Hash parameters are seeded so runs are reproducible.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .cleaning import CleanRecord
from .textnorm import fold_key

_MERSENNE_61 = (1 << 61) - 1


@dataclass(frozen=True)
class DuplicateCluster:
    member_record_ids: tuple[str, ...]
    representative_record_id: str
    pair_similarities: dict[tuple[str, str], float]


def text_shingles(text: str, shingle_size: int) -> frozenset[int]:
    """Hashed character shingles of the folded text."""
    folded = fold_key(text)
    if not folded:
        return frozenset()
    if len(folded) < shingle_size:
        grams = [folded]
    else:
        grams = [
            folded[i : i + shingle_size]
            for i in range(len(folded) - shingle_size + 1)
        ]
    return frozenset(_stable_hash(g) for g in grams)


def _stable_hash(gram: str) -> int:
    digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def identity_text(record: CleanRecord, identity_fields: tuple[str, ...]) -> str:
    names = identity_fields or tuple(sorted(record.fields))
    return " | ".join(record.fields.get(name, "") for name in names)


def minhash_signature(
    shingles: frozenset[int], coefficients: list[tuple[int, int]]
) -> tuple[int, ...]:
    if not shingles:
        return tuple(_MERSENNE_61 for _ in coefficients)
    return tuple(
        min((a * x + b) % _MERSENNE_61 for x in shingles) for a, b in coefficients
    )


def estimated_jaccard(sig_a: tuple[int, ...], sig_b: tuple[int, ...]) -> float:
    equal = sum(1 for a, b in zip(sig_a, sig_b) if a == b)
    return equal / len(sig_a)


def hash_coefficients(num_hashes: int, seed: int = 1729) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    return [
        (rng.randrange(1, _MERSENNE_61), rng.randrange(0, _MERSENNE_61))
        for _ in range(num_hashes)
    ]


def detect_near_duplicates(
    records: list[CleanRecord],
    shingle_size: int = 3,
    num_hashes: int = 128,
    bands: int = 32,
    threshold: float = 0.8,
    identity_fields: tuple[str, ...] = (),
    seed: int = 1729,
) -> list[DuplicateCluster]:
    if num_hashes % bands != 0:
        raise ValueError(
            f"num_hashes ({num_hashes}) must be divisible by bands ({bands})"
        )
    rows = num_hashes // bands
    coefficients = hash_coefficients(num_hashes, seed)

    signatures: dict[str, tuple[int, ...]] = {}
    for record in records:
        shingles = text_shingles(
            identity_text(record, identity_fields), shingle_size
        )
        signatures[record.record_id] = minhash_signature(shingles, coefficients)

    buckets: dict[tuple[int, tuple[int, ...]], list[str]] = {}
    for record_id, sig in signatures.items():
        for band in range(bands):
            key = (band, sig[band * rows : (band + 1) * rows])
            buckets.setdefault(key, []).append(record_id)

    candidate_pairs: set[tuple[str, str]] = set()
    for members in buckets.values():
        if len(members) < 2:
            continue
        members = sorted(members)
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                candidate_pairs.add((members[i], members[j]))

    parent: dict[str, str] = {rid: rid for rid in signatures}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    pair_sims: dict[tuple[str, str], float] = {}
    for a, b in sorted(candidate_pairs):
        est = estimated_jaccard(signatures[a], signatures[b])
        if est >= threshold:
            pair_sims[(a, b)] = est
            union(a, b)

    groups: dict[str, list[str]] = {}
    for rid in signatures:
        groups.setdefault(find(rid), []).append(rid)

    clusters: list[DuplicateCluster] = []
    for root, members in sorted(groups.items()):
        if len(members) < 2:
            continue
        members = tuple(sorted(members))
        evidence = {
            pair: sim
            for pair, sim in pair_sims.items()
            if pair[0] in members and pair[1] in members
        }
        clusters.append(DuplicateCluster(members, members[0], evidence))
    return clusters
