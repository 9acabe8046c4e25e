"""Spelling correction over a precomputed deletion index.

The dictionary stores every term (words and phrases) together with all
variants reachable by deleting up to ``max_edit_distance`` characters; lookup
generates the same deletion variants for the input token and intersects. Any
candidate surviving the true edit-distance check wins by (distance, higher
frequency, lexicographic term). Deleting the space of a phrase is how
"highschool" finds "high school".
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .textnorm import fold_text, levenshtein

_WORD_RE = re.compile(r"\w+", re.UNICODE)
_HAS_DIGIT_RE = re.compile(r"\d")


@dataclass
class SpellingDictionary:
    terms: dict[str, int]  # folded term -> frequency
    display: dict[str, str]  # folded term -> display form
    max_edit_distance: int = 2
    deletion_index: dict[str, list[str]] = field(default_factory=dict, repr=False)

    def __contains__(self, token: str) -> bool:
        return fold_text(token) in self.terms


def _deletions(term: str, max_distance: int) -> set[str]:
    variants = {term}
    frontier = {term}
    for _ in range(max_distance):
        next_frontier = set()
        for word in frontier:
            for i in range(len(word)):
                shorter = word[:i] + word[i + 1 :]
                if shorter not in variants:
                    variants.add(shorter)
                    next_frontier.add(shorter)
        frontier = next_frontier
    return variants


def build_dictionary(
    entries: dict[str, int], max_edit_distance: int = 2
) -> SpellingDictionary:
    terms: dict[str, int] = {}
    display: dict[str, str] = {}
    for term, freq in entries.items():
        key = fold_text(term)
        if key in terms:
            terms[key] += freq
        else:
            terms[key] = freq
            display[key] = term
    index: dict[str, list[str]] = {}
    for key in terms:
        for variant in _deletions(key, max_edit_distance):
            index.setdefault(variant, []).append(key)
    return SpellingDictionary(terms, display, max_edit_distance, index)


def load_dictionary(path: str | Path, max_edit_distance: int = 2) -> SpellingDictionary:
    """Dictionary file: one ``term frequency`` per line, UTF-8, phrases allowed."""
    entries: dict[str, int] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        term, _, freq = line.rpartition(" ")
        if not term or not freq.isdigit():
            raise ValueError(f"{path}:{lineno}: expected 'term frequency', got {line!r}")
        entries[term] = entries.get(term, 0) + int(freq)
    return build_dictionary(entries, max_edit_distance)


def _allowed_distance(token: str, max_edit: int) -> int:
    # Short tokens only tolerate small edits; rewriting 3-letter codes at
    # distance 2 merges distinct identifiers.
    if len(token) <= 2:
        return 0
    if len(token) <= 4:
        return min(1, max_edit)
    return max_edit


def correct_token(
    token: str, dictionary: SpellingDictionary, protected: frozenset[str] = frozenset()
) -> tuple[str, bool]:
    """Return (replacement, found). Unknown tokens with no candidate come back
    unchanged with found=False so the caller can flag the field."""
    key = fold_text(token)
    if key in dictionary.terms or key in protected:
        return token, True
    if _HAS_DIGIT_RE.search(token):
        return token, True
    budget = _allowed_distance(key, dictionary.max_edit_distance)
    if budget == 0:
        return token, False
    candidates: set[str] = set()
    for variant in _deletions(key, budget):
        candidates.update(dictionary.deletion_index.get(variant, ()))
    best: tuple[int, int, str] | None = None
    for cand in candidates:
        dist = levenshtein(key, cand)
        if dist > budget:
            continue
        ranked = (dist, -dictionary.terms[cand], cand)
        if best is None or ranked < best:
            best = ranked
    if best is None:
        return token, False
    return dictionary.display[best[2]], True


def correct_value(
    value: str, dictionary: SpellingDictionary, protected: frozenset[str] = frozenset()
) -> tuple[str, list[str]]:
    """Correct each word of ``value`` independently; separators are preserved.

    Returns the corrected text and the list of tokens that had no candidate.
    """
    misses: list[str] = []
    out: list[str] = []
    pos = 0
    for match in _WORD_RE.finditer(value):
        out.append(value[pos : match.start()])
        token = match.group(0)
        replacement, found = correct_token(token, dictionary, protected)
        if not found:
            misses.append(token)
        out.append(replacement)
        pos = match.end()
    out.append(value[pos:])
    return "".join(out), misses


def correct_spelling(value: str, dictionary: SpellingDictionary) -> str:
    return correct_value(value, dictionary)[0]
