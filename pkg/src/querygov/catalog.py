"""Schema whitelist, safety policy, canonical entity tables, and record rules.

Everything lives in one versioned JSON document so the policy layer stays
auditable and diffable. Catalog objects are immutable after load; reloading
produces a new instance that consumers swap atomically.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .textnorm import fold_key, fold_text

SUPPORTED_LANGUAGES = ("en", "tr", "ru")

SEMANTIC_TYPES = frozenset({"text", "integer", "decimal", "date", "boolean", "identifier"})

ENTITY_DOMAINS = ("school", "city", "project", "role", "department")

_SQL_WORDS = frozenset(
    "and or not in like between is null true false select from where".split()
)
_IDENT_RE = re.compile(r"[A-Za-z_]\w*")
_STRING_RE = re.compile(r"'(?:[^']|'')*'")


class CatalogError(ValueError):
    """Catalog document failed to parse or violated an invariant."""


class UnknownDomainError(CatalogError):
    pass


@dataclass(frozen=True)
class ColumnDef:
    name: str
    semantic_type: str
    is_pii: bool = False


@dataclass(frozen=True)
class TableDef:
    name: str
    columns: tuple[ColumnDef, ...]

    def column(self, name: str) -> ColumnDef | None:
        key = fold_text(name)
        for col in self.columns:
            if fold_text(col.name) == key:
                return col
        return None


@dataclass(frozen=True)
class PolicyRules:
    forbidden_topic_terms: dict[str, frozenset[str]]
    pii_redact_columns: frozenset[str]  # qualified "table.column", folded
    business_defaults: tuple[tuple[str, str], ...]
    allowed_statement_kinds: frozenset[str] = frozenset({"SELECT"})

    def forbidden_terms_folded(self) -> frozenset[str]:
        terms: set[str] = set()
        for words in self.forbidden_topic_terms.values():
            terms.update(fold_text(w) for w in words)
        return frozenset(terms)


@dataclass(frozen=True)
class Variant:
    variant: str
    lang: str | None = None


@dataclass(frozen=True)
class CanonicalEntityTable:
    domain: str
    entries: dict[str, tuple[Variant, ...]]  # canonical form -> variants

    def variant_index(self) -> dict[str, str]:
        index: dict[str, str] = {}
        for canonical, variants in self.entries.items():
            index[fold_key(canonical)] = canonical
            for v in variants:
                index[fold_key(v.variant)] = canonical
        return index


@dataclass(frozen=True)
class RecordRule:
    """One data-quality rule over record fields.

    Kinds:
      allowed_pairs  value_field must be one of pairs[key_field value];
                     not applicable when either field is empty or the key
                     value is unmapped.
      implies_value  when when_field == when_value, then_field must be in
                     then_values; not applicable otherwise.
      value_in       field value must be one of values (empty allowed via "").
    """

    rule_id: str
    description: str
    kind: str
    params: dict
    severity: str = "flag_for_review"

    def evaluate(self, fields: dict[str, str]) -> tuple[str, str]:
        """Return (outcome, message); outcome is 'ok', 'violation', or 'na'."""
        if self.kind == "allowed_pairs":
            key = fields.get(self.params["key_field"], "").strip()
            val = fields.get(self.params["value_field"], "").strip()
            if not key or not val:
                return "na", ""
            allowed = self._pairs_folded().get(fold_key(key))
            if allowed is None:
                return "na", ""
            if fold_key(val) in allowed:
                return "ok", ""
            return (
                "violation",
                f"{self.params['value_field']}={val!r} not allowed for "
                f"{self.params['key_field']}={key!r}",
            )
        if self.kind == "implies_value":
            when = fields.get(self.params["when_field"], "").strip()
            if fold_key(when) != fold_key(self.params["when_value"]):
                return "na", ""
            then = fields.get(self.params["then_field"], "").strip()
            allowed = {fold_key(v) for v in self.params["then_values"]}
            if fold_key(then) in allowed:
                return "ok", ""
            return (
                "violation",
                f"{self.params['then_field']}={then!r} inconsistent with "
                f"{self.params['when_field']}={when!r}",
            )
        if self.kind == "value_in":
            value = fields.get(self.params["field"], "")
            allowed = {fold_key(v) for v in self.params["values"]}
            if fold_key(value) in allowed:
                return "ok", ""
            return "violation", f"{self.params['field']}={value!r} is malformed"
        return "na", ""

    def fields_involved(self) -> list[str]:
        keys = ("key_field", "value_field", "when_field", "then_field", "field")
        return [self.params[k] for k in keys if k in self.params]

    def _pairs_folded(self) -> dict[str, set[str]]:
        return {
            fold_key(k): {fold_key(v) for v in vals}
            for k, vals in self.params["pairs"].items()
        }


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[RecordRule, ...]

    def by_id(self, rule_id: str) -> RecordRule | None:
        for rule in self.rules:
            if rule.rule_id == rule_id:
                return rule
        return None


@dataclass(frozen=True)
class SchemaCatalog:
    version: int
    tables: tuple[TableDef, ...]
    functions_allowed: frozenset[str]
    policy: PolicyRules
    canonical: dict[str, CanonicalEntityTable]
    rules: RuleSet
    # Derived lookup structures, built once at load.
    _table_index: dict[str, TableDef] = field(default_factory=dict, compare=False, repr=False)
    _variant_indexes: dict[str, dict[str, str]] = field(
        default_factory=dict, compare=False, repr=False
    )

    def __post_init__(self):
        object.__setattr__(
            self, "_table_index", {fold_text(t.name): t for t in self.tables}
        )
        object.__setattr__(
            self,
            "_variant_indexes",
            {domain: table.variant_index() for domain, table in self.canonical.items()},
        )

    def table(self, name: str) -> TableDef | None:
        return self._table_index.get(fold_text(name))

    def column_exists(self, name: str) -> bool:
        key = fold_text(name)
        return any(
            fold_text(col.name) == key for t in self.tables for col in t.columns
        )

    def pii_columns(self) -> frozenset[str]:
        return self.policy.pii_redact_columns

    def function_allowed(self, name: str) -> bool:
        return fold_text(name) in {fold_text(f) for f in self.functions_allowed}

    def canonical_lookup(self, domain: str, variant: str) -> str | None:
        if domain not in self.canonical:
            raise UnknownDomainError(f"unknown entity domain: {domain!r}")
        return self._variant_indexes[domain].get(fold_key(variant))

    def domain_variants(self, domain: str) -> dict[str, str]:
        if domain not in self.canonical:
            raise UnknownDomainError(f"unknown entity domain: {domain!r}")
        return self._variant_indexes[domain]

    def known_entity_value(self, value: str) -> bool:
        key = fold_key(value)
        return any(key in idx for idx in self._variant_indexes.values())

    def english_entity_tokens(self) -> frozenset[str]:
        """Tokens of canonical forms and English-tagged variants only.

        Untagged or non-English variants (Moskva, ODTU) stay out so the
        translation stage still sees them.
        """
        tokens: set[str] = set()
        for table in self.canonical.values():
            for canonical, variants in table.entries.items():
                tokens.update(fold_text(t) for t in canonical.split())
                for v in variants:
                    if v.lang == "en":
                        tokens.update(fold_text(t) for t in v.variant.split())
        return frozenset(tokens)


def lookup_canonical(catalog: SchemaCatalog, domain: str, variant: str) -> str | None:
    """Case-insensitive, whitespace-normalized variant lookup."""
    return catalog.canonical_lookup(domain, variant)


def _require(doc: dict, key: str, context: str):
    if key not in doc:
        raise CatalogError(f"{context}: missing required field {key!r}")
    return doc[key]


def _parse_tables(raw_tables, context: str) -> tuple[TableDef, ...]:
    tables: list[TableDef] = []
    seen_tables: set[str] = set()
    for i, raw in enumerate(raw_tables):
        tctx = f"{context}: tables[{i}]"
        name = _require(raw, "name", tctx)
        tkey = fold_text(name)
        if tkey in seen_tables:
            raise CatalogError(f"{tctx}: duplicate table name {name!r} (case-folded)")
        seen_tables.add(tkey)
        raw_cols = _require(raw, "columns", tctx)
        if not raw_cols:
            raise CatalogError(f"{tctx}: table {name!r} has no columns")
        cols: list[ColumnDef] = []
        seen_cols: set[str] = set()
        for j, rc in enumerate(raw_cols):
            cctx = f"{tctx}.columns[{j}]"
            cname = _require(rc, "name", cctx)
            ckey = fold_text(cname)
            if ckey in seen_cols:
                raise CatalogError(
                    f"{cctx}: duplicate column name {cname!r} in table {name!r} (case-folded)"
                )
            seen_cols.add(ckey)
            ctype = _require(rc, "type", cctx)
            if ctype not in SEMANTIC_TYPES:
                raise CatalogError(
                    f"{cctx}: unknown semantic type {ctype!r} (allowed: {sorted(SEMANTIC_TYPES)})"
                )
            cols.append(ColumnDef(cname, ctype, bool(rc.get("pii", False))))
        tables.append(TableDef(name, tuple(cols)))
    return tuple(tables)


def _predicate_identifiers(predicate: str) -> list[str]:
    masked = _STRING_RE.sub("''", predicate)
    return [
        tok for tok in _IDENT_RE.findall(masked) if fold_text(tok) not in _SQL_WORDS
    ]


def _parse_policy(raw: dict, tables: tuple[TableDef, ...], context: str) -> PolicyRules:
    terms_raw = _require(raw, "forbidden_topic_terms", context)
    terms: dict[str, frozenset[str]] = {}
    for lang in SUPPORTED_LANGUAGES:
        words = terms_raw.get(lang, [])
        if not words:
            raise CatalogError(
                f"{context}: forbidden_topic_terms.{lang} must be non-empty"
            )
        terms[lang] = frozenset(words)

    column_keys = {
        f"{fold_text(t.name)}.{fold_text(c.name)}" for t in tables for c in t.columns
    }
    bare_columns = {fold_text(c.name) for t in tables for c in t.columns}

    pii: set[str] = set()
    for qualified in raw.get("pii_redact_columns", []):
        key = fold_text(qualified)
        if key not in column_keys:
            raise CatalogError(
                f"{context}: pii_redact_columns references {qualified!r}, "
                f"which is not a catalog column"
            )
        pii.add(key)

    defaults: list[tuple[str, str]] = []
    for concept, predicate in raw.get("business_defaults", []):
        for ident in _predicate_identifiers(predicate):
            if fold_text(ident) not in bare_columns:
                raise CatalogError(
                    f"{context}: business_defaults[{concept!r}] references "
                    f"{ident!r}, which is not a catalog column"
                )
        defaults.append((concept, predicate))

    kinds = frozenset(raw.get("allowed_statement_kinds", ["SELECT"]))
    return PolicyRules(terms, frozenset(pii), tuple(defaults), kinds)


def _parse_canonical(raw: dict, context: str) -> dict[str, CanonicalEntityTable]:
    out: dict[str, CanonicalEntityTable] = {}
    for domain, entries_raw in raw.items():
        if domain not in ENTITY_DOMAINS:
            raise CatalogError(f"{context}: unknown entity domain {domain!r}")
        entries: dict[str, tuple[Variant, ...]] = {}
        owner: dict[str, str] = {}
        for canonical, raw_variants in entries_raw.items():
            variants: list[Variant] = []
            for rv in raw_variants:
                if isinstance(rv, str):
                    variants.append(Variant(rv))
                else:
                    variants.append(Variant(rv["variant"], rv.get("lang")))
            for v in variants:
                key = fold_key(v.variant)
                prior = owner.get(key)
                if prior is not None and prior != canonical:
                    raise CatalogError(
                        f"{context}: variant {v.variant!r} in domain {domain!r} maps to "
                        f"both {prior!r} and {canonical!r}"
                    )
                owner[key] = canonical
            # Every canonical form is a variant of itself.
            self_key = fold_key(canonical)
            prior = owner.get(self_key)
            if prior is not None and prior != canonical:
                raise CatalogError(
                    f"{context}: canonical form {canonical!r} collides with a variant of {prior!r}"
                )
            owner[self_key] = canonical
            entries[canonical] = tuple(variants)
        out[domain] = CanonicalEntityTable(domain, entries)
    return out


def _parse_rules(raw_rules, tables: tuple[TableDef, ...], context: str) -> RuleSet:
    bare_columns = {fold_text(c.name) for t in tables for c in t.columns}
    rules: list[RecordRule] = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_rules):
        rctx = f"{context}: record_rules[{i}]"
        rule_id = _require(raw, "rule_id", rctx)
        if rule_id in seen:
            raise CatalogError(f"{rctx}: duplicate rule_id {rule_id!r}")
        seen.add(rule_id)
        kind = _require(raw, "kind", rctx)
        if kind not in ("allowed_pairs", "implies_value", "value_in"):
            raise CatalogError(f"{rctx}: unknown rule kind {kind!r}")
        severity = raw.get("severity", "flag_for_review")
        if severity not in ("flag_for_review", "reject"):
            raise CatalogError(f"{rctx}: unknown severity {severity!r}")
        params = {
            k: v
            for k, v in raw.items()
            if k not in ("rule_id", "description", "kind", "severity")
        }
        rule = RecordRule(rule_id, raw.get("description", ""), kind, params, severity)
        for field_name in rule.fields_involved():
            if fold_text(field_name) not in bare_columns:
                raise CatalogError(
                    f"{rctx}: rule {rule_id!r} references field {field_name!r}, "
                    f"which is not a catalog column"
                )
        rules.append(rule)
    return RuleSet(tuple(rules))


def parse_catalog_document(doc: dict, context: str = "catalog") -> SchemaCatalog:
    version = _require(doc, "version", context)
    if not isinstance(version, int) or version < 0:
        raise CatalogError(f"{context}: version must be a non-negative integer")
    tables = _parse_tables(_require(doc, "tables", context), context)
    functions = frozenset(_require(doc, "functions_allowed", context))
    policy = _parse_policy(_require(doc, "policy", context), tables, context)
    canonical = _parse_canonical(doc.get("canonical_entities", {}), context)
    rules = _parse_rules(doc.get("record_rules", []), tables, context)
    return SchemaCatalog(version, tables, functions, policy, canonical, rules)


def load_catalog(path: str | Path) -> SchemaCatalog:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError(f"cannot read catalog file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(
            f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_catalog_document(doc, context=str(path))


def catalog_to_document(catalog: SchemaCatalog) -> dict:
    """Canonical document form; load(dump(c)) == c."""
    return {
        "version": catalog.version,
        "tables": [
            {
                "name": t.name,
                "columns": [
                    {"name": c.name, "type": c.semantic_type, "pii": c.is_pii}
                    for c in t.columns
                ],
            }
            for t in catalog.tables
        ],
        "functions_allowed": sorted(catalog.functions_allowed),
        "policy": {
            "forbidden_topic_terms": {
                lang: sorted(words)
                for lang, words in sorted(catalog.policy.forbidden_topic_terms.items())
            },
            "pii_redact_columns": sorted(catalog.policy.pii_redact_columns),
            "business_defaults": [list(bd) for bd in catalog.policy.business_defaults],
            "allowed_statement_kinds": sorted(catalog.policy.allowed_statement_kinds),
        },
        "canonical_entities": {
            domain: {
                canonical: [
                    {"variant": v.variant, "lang": v.lang} if v.lang else v.variant
                    for v in variants
                ]
                for canonical, variants in table.entries.items()
            }
            for domain, table in sorted(catalog.canonical.items())
        },
        "record_rules": [
            {
                "rule_id": r.rule_id,
                "description": r.description,
                "kind": r.kind,
                "severity": r.severity,
                **r.params,
            }
            for r in catalog.rules.rules
        ],
    }


def dump_catalog(catalog: SchemaCatalog, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(catalog_to_document(catalog), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )


def serialize_schema_for_prompt(catalog: SchemaCatalog) -> str:
    """Deterministic textual schema rendering for the system prompt.

    Tables and columns are ordered case-folded lexicographically, so
    identical catalogs always serialize to identical bytes.
    """
    lines: list[str] = [f"-- schema version {catalog.version}"]
    for table in sorted(catalog.tables, key=lambda t: fold_text(t.name)):
        lines.append(f"table {table.name} (")
        for col in sorted(table.columns, key=lambda c: fold_text(c.name)):
            pii = "  [pii: redacted in results]" if col.is_pii else ""
            lines.append(f"  {col.name} {col.semantic_type}{pii}")
        lines.append(")")
    if catalog.functions_allowed:
        lines.append("allowed functions: " + ", ".join(sorted(catalog.functions_allowed)))
    for concept, predicate in catalog.policy.business_defaults:
        lines.append(f"business rule: {concept} means {predicate}")
    return "\n".join(lines) + "\n"
