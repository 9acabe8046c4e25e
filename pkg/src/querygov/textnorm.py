"""Text folding, tokenization, edit distance, and phonetic coding.

Every comparison in the cleaning and guard layers goes through ``fold_text``
so that Turkish dotted/dotless I, Unicode confusables, and mixed casing never
break a lookup. The phonetic scheme used for fuzzy entity matching is
American Soundex (documented choice; see README).
"""

from __future__ import annotations

import re
import unicodedata

# str.casefold() maps 'İ' to 'i' + U+0307 and leaves 'ı' alone, both of which
# break equality against ASCII-typed input. Fold all four I variants to 'i'.
_I_FOLD = {"İ": "i", "I": "i", "ı": "i", "i": "i"}

# Turkish lowercasing differs from the default: dotted İ -> i, dotless I -> ı.
_TURKISH_LOWER = {"İ": "i", "I": "ı"}

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)

_SOUNDEX_CODES = {
    **dict.fromkeys("BFPV", "1"),
    **dict.fromkeys("CGJKQSXZ", "2"),
    **dict.fromkeys("DT", "3"),
    "L": "4",
    **dict.fromkeys("MN", "5"),
    "R": "6",
}


def fold_text(value: str) -> str:
    """Locale-independent case fold with the Turkish I exception map applied."""
    out = []
    for ch in value:
        mapped = _I_FOLD.get(ch)
        if mapped is not None:
            out.append(mapped)
        else:
            out.append(ch.casefold())
    return "".join(out)


def norm_space(value: str) -> str:
    return " ".join(value.split())


def fold_key(value: str) -> str:
    """Canonical lookup key: folded, whitespace-collapsed."""
    return norm_space(fold_text(value))


def lower_for(value: str, language: str | None = None) -> str:
    """Lowercase, using Turkish rules when the language is Turkish."""
    if language == "tr":
        return "".join(_TURKISH_LOWER.get(ch, ch.lower()) for ch in value)
    return value.lower()


def tokenize(value: str) -> list[str]:
    return _TOKEN_RE.findall(value)


def fold_tokens(value: str) -> list[str]:
    return tokenize(fold_text(value))


def strip_to_ascii(value: str) -> str:
    """ASCII approximation: fold Turkish I, then drop combining marks."""
    folded = "".join(_I_FOLD.get(ch, ch) for ch in value)
    decomposed = unicodedata.normalize("NFKD", folded)
    return "".join(ch for ch in decomposed if ord(ch) < 128)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost insert/delete/substitute distance over folded scalars."""
    a = fold_text(a)
    b = fold_text(b)
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) > len(b):
        a, b = b, a
    prev = list(range(len(a) + 1))
    for j, cb in enumerate(b, start=1):
        cur = [j]
        for i, ca in enumerate(a, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[i] + 1, cur[i - 1] + 1, prev[i - 1] + cost))
        prev = cur
    return prev[-1]


def levenshtein_capped(a: str, b: str, cap: int) -> int:
    """levenshtein(), but allowed to return any value > cap once it exceeds cap."""
    if abs(len(a) - len(b)) > cap:
        return cap + 1
    return levenshtein(a, b)


def soundex(value: str) -> str:
    """American Soundex over the ASCII approximation of ``value``.

    Empty-after-folding input yields the empty code. H and W are transparent
    (same-coded letters around them merge); vowels separate.
    """
    letters = [ch for ch in strip_to_ascii(value).upper() if ch.isalpha()]
    if not letters:
        return ""
    first = letters[0]
    digits = []
    prev_code = _SOUNDEX_CODES.get(first, "")
    for ch in letters[1:]:
        code = _SOUNDEX_CODES.get(ch)
        if code is None:
            # Vowels reset the run; H/W are skipped without resetting.
            if ch not in "HW":
                prev_code = ""
            continue
        if code != prev_code:
            digits.append(code)
        prev_code = code
    return (first + "".join(digits))[:4].ljust(4, "0")


def title_case_value(value: str, acronym_max_len: int = 4) -> str:
    """Capitalize each token, preserving short all-caps acronyms (e.g. GPP)."""
    parts = []
    for token in value.split():
        if token.isupper() and len(token) <= acronym_max_len:
            parts.append(token)
        else:
            parts.append(token[:1].upper() + token[1:].lower())
    return " ".join(parts)
