"""Four-stage record cleaning: translate, spell-correct, canonicalize, validate.

Stages run in a fixed order per field; every change is recorded in the
record's provenance chain, and data problems never abort a record — they
become flags. Stage resources (catalog, dictionary, translator) are immutable
and shared, so records can be cleaned in parallel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import RuleSet, SchemaCatalog
from .spelling import SpellingDictionary, correct_value
from .textnorm import (
    fold_key,
    fold_text,
    levenshtein_capped,
    norm_space,
    soundex,
    title_case_value,
)
from .translation import TranslationError

# Stage names as they appear in provenance chains.
STAGE_WHITESPACE = "whitespace"
STAGE_TRANSLATE = "translate"
STAGE_SPELLING = "spelling"
STAGE_CANONICALIZE = "canonicalize"

# Flag rule ids raised by stages themselves (present in every RuleSet's
# vocabulary; see RuleViolation invariant).
FLAG_TRANSLATION_FAILURE = "stage.translation_failure"
FLAG_SPELLING_UNKNOWN = "stage.spelling_unknown"
FLAG_ENTITY_UNMATCHED = "stage.entity_unmatched"
STAGE_FLAG_IDS = frozenset(
    {FLAG_TRANSLATION_FAILURE, FLAG_SPELLING_UNKNOWN, FLAG_ENTITY_UNMATCHED}
)


@dataclass(frozen=True)
class RawRecord:
    record_id: str
    modified_at: str  # ISO-8601
    fields: dict[str, str]

    def __post_init__(self):
        if not self.record_id:
            raise ValueError("record_id must be non-empty")
        if not self.modified_at:
            raise ValueError("modified_at must be present")


@dataclass(frozen=True)
class Transform:
    stage: str
    before: str
    after: str


@dataclass(frozen=True)
class RuleViolation:
    rule_id: str
    field_names: tuple[str, ...]
    message: str
    severity: str = "flag_for_review"


@dataclass
class CleanRecord:
    record_id: str
    modified_at: str
    fields: dict[str, str]
    provenance: dict[str, list[Transform]] = field(default_factory=dict)
    flags: list[RuleViolation] = field(default_factory=list)

    def has_reject_flag(self) -> bool:
        return any(f.severity == "reject" for f in self.flags)


@dataclass(frozen=True)
class FieldConfig:
    domain: str | None = None
    translate: bool = True
    spelling: bool = True
    title_case: bool = False
    skip: bool = False


@dataclass(frozen=True)
class DedupeConfig:
    shingle_size: int = 3
    num_hashes: int = 128
    bands: int = 32
    jaccard_threshold: float = 0.8
    identity_fields: tuple[str, ...] = ()


@dataclass(frozen=True)
class PipelineConfig:
    translate: bool = True
    spelling: bool = True
    canonicalize: bool = True
    validate: bool = True
    spelling_max_edit_distance: int = 2
    canonical_max_distance_short: int = 2
    canonical_max_distance_long: int = 3
    canonical_short_length: int = 10
    fields: dict[str, FieldConfig] = field(default_factory=dict)
    dedupe: DedupeConfig = field(default_factory=DedupeConfig)

    def field_config(self, name: str) -> FieldConfig:
        return self.fields.get(name, FieldConfig())

    def canonical_max_distance(self, value: str) -> int:
        if len(value) <= self.canonical_short_length:
            return self.canonical_max_distance_short
        return self.canonical_max_distance_long


def load_pipeline_config(path: str | Path) -> PipelineConfig:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    stages = doc.get("stages", {})
    fields = {
        name: FieldConfig(
            domain=cfg.get("domain"),
            translate=cfg.get("translate", True),
            spelling=cfg.get("spelling", True),
            title_case=cfg.get("title_case", False),
            skip=cfg.get("skip", False),
        )
        for name, cfg in doc.get("fields", {}).items()
    }
    ded = doc.get("dedupe", {})
    return PipelineConfig(
        translate=stages.get("translate", True),
        spelling=stages.get("spelling", True),
        canonicalize=stages.get("canonicalize", True),
        validate=stages.get("validate", True),
        spelling_max_edit_distance=doc.get("spelling_max_edit_distance", 2),
        canonical_max_distance_short=doc.get("canonical_max_distance_short", 2),
        canonical_max_distance_long=doc.get("canonical_max_distance_long", 3),
        canonical_short_length=doc.get("canonical_short_length", 10),
        fields=fields,
        dedupe=DedupeConfig(
            shingle_size=ded.get("shingle_size", 3),
            num_hashes=ded.get("num_hashes", 128),
            bands=ded.get("bands", 32),
            jaccard_threshold=ded.get("jaccard_threshold", 0.8),
            identity_fields=tuple(ded.get("identity_fields", ())),
        ),
    )


def is_english(value: str, vocabulary: frozenset[str]) -> bool:
    """Already-English heuristic: >= 90% ASCII letters and all tokens known."""
    alpha = [ch for ch in value if ch.isalpha()]
    if not alpha:
        return True
    ascii_ratio = sum(1 for ch in alpha if ord(ch) < 128) / len(alpha)
    if ascii_ratio < 0.9:
        return False
    from .textnorm import fold_tokens

    return all(tok in vocabulary for tok in fold_tokens(value))


def canonicalize_entity(
    domain: str,
    value: str,
    catalog: SchemaCatalog,
    max_distance: int,
) -> tuple[str, bool]:
    """Map a value onto its canonical entity form.

    Exact variant lookup wins outright; otherwise the variant with the
    smallest edit distance within ``max_distance`` (ties prefer an equal
    phonetic code, then lexicographic variant order). With no match the value
    is returned title-cased and unmatched.
    """
    variants = catalog.domain_variants(domain)
    cleaned = norm_space(value)
    exact = variants.get(fold_key(cleaned))
    if exact is not None:
        return exact, True
    best: tuple[int, int, str] | None = None
    best_canonical: str | None = None
    value_code = soundex(cleaned)
    for variant_key, canonical in variants.items():
        dist = levenshtein_capped(fold_key(cleaned), variant_key, max_distance)
        if dist > max_distance:
            continue
        phonetic_penalty = 0 if soundex(variant_key) == value_code else 1
        ranked = (dist, phonetic_penalty, variant_key)
        if best is None or ranked < best:
            best = ranked
            best_canonical = canonical
    if best_canonical is not None:
        return best_canonical, True
    return title_case_value(cleaned), False


class CleaningPipeline:
    """Shared, immutable stage resources bound to a configuration."""

    def __init__(
        self,
        catalog: SchemaCatalog,
        config: PipelineConfig,
        dictionary: SpellingDictionary,
        translator,
    ):
        self.catalog = catalog
        self.config = config
        self.dictionary = dictionary
        self.translator = translator
        self._entity_tokens = self._all_entity_tokens()
        self._english_vocab = frozenset(
            set(dictionary.terms)
            | {tok for term in dictionary.terms for tok in term.split()}
            | catalog.english_entity_tokens()
        )

    def _all_entity_tokens(self) -> frozenset[str]:
        tokens: set[str] = set()
        for table in self.catalog.canonical.values():
            for canonical, variants in table.entries.items():
                tokens.update(fold_text(t) for t in canonical.split())
                for v in variants:
                    tokens.update(fold_text(t) for t in v.variant.split())
        return frozenset(tokens)

    def normalize_translation(
        self, value: str, source_language_hint: str | None = None
    ) -> str:
        """Unified English representation of a field value.

        Values detected as English (or known entity variants tagged English)
        pass through unchanged; provider failures propagate as
        TranslationError so the caller can flag the field.
        """
        if not value.strip():
            return value
        if is_english(value, self._english_vocab):
            return value
        return self.translator.translate(
            value, source_lang=source_language_hint, target_lang="en"
        )

    def clean_record(self, raw: RawRecord) -> CleanRecord:
        fields: dict[str, str] = {}
        provenance: dict[str, list[Transform]] = {}
        flags: list[RuleViolation] = []
        for name, raw_value in raw.fields.items():
            cfg = self.config.field_config(name)
            value = raw_value if raw_value is not None else ""
            chain: list[Transform] = []
            if cfg.skip:
                fields[name] = value
                provenance[name] = chain
                continue

            collapsed = norm_space(value)
            if collapsed != value:
                chain.append(Transform(STAGE_WHITESPACE, value, collapsed))
                value = collapsed

            if self.config.translate and cfg.translate and value:
                try:
                    translated = self.normalize_translation(value)
                    if translated != value:
                        chain.append(Transform(STAGE_TRANSLATE, value, translated))
                        value = translated
                except TranslationError as exc:
                    flags.append(
                        RuleViolation(
                            FLAG_TRANSLATION_FAILURE,
                            (name,),
                            f"translation failed, raw value kept: {exc}",
                        )
                    )

            if self.config.spelling and cfg.spelling and value:
                corrected, misses = correct_value(
                    value, self.dictionary, protected=self._entity_tokens
                )
                if corrected != value:
                    chain.append(Transform(STAGE_SPELLING, value, corrected))
                    value = corrected
                for miss in misses:
                    flags.append(
                        RuleViolation(
                            FLAG_SPELLING_UNKNOWN,
                            (name,),
                            f"no dictionary candidate for token {miss!r}",
                        )
                    )

            if self.config.canonicalize and value:
                if cfg.domain is not None:
                    canonical, matched = canonicalize_entity(
                        cfg.domain,
                        value,
                        self.catalog,
                        self.config.canonical_max_distance(value),
                    )
                    if not matched:
                        flags.append(
                            RuleViolation(
                                FLAG_ENTITY_UNMATCHED,
                                (name,),
                                f"value {value!r} not found in {cfg.domain!r} entities",
                            )
                        )
                    if canonical != value:
                        chain.append(Transform(STAGE_CANONICALIZE, value, canonical))
                        value = canonical
                elif cfg.title_case:
                    cased = title_case_value(value)
                    if cased != value:
                        chain.append(Transform(STAGE_CANONICALIZE, value, cased))
                        value = cased

            fields[name] = value
            provenance[name] = chain

        record = CleanRecord(raw.record_id, raw.modified_at, fields, provenance, flags)
        if self.config.validate:
            record.flags.extend(validate_record(record, self.catalog.rules))
        return record


def validate_record(record: CleanRecord, rules: RuleSet) -> list[RuleViolation]:
    """Evaluate every rule; the record itself is never mutated."""
    violations: list[RuleViolation] = []
    for rule in rules.rules:
        outcome, message = rule.evaluate(record.fields)
        if outcome == "violation":
            violations.append(
                RuleViolation(
                    rule.rule_id,
                    tuple(rule.fields_involved()),
                    message,
                    rule.severity,
                )
            )
    return violations
