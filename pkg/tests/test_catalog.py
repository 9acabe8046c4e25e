from __future__ import annotations

import json

import pytest

from querygov.catalog import (
    CatalogError,
    UnknownDomainError,
    catalog_to_document,
    dump_catalog,
    load_catalog,
    lookup_canonical,
    parse_catalog_document,
    serialize_schema_for_prompt,
)

MINIMAL_DOC = {
    "version": 3,
    "tables": [
        {
            "name": "employees",
            "columns": [
                {"name": "actual_working_city", "type": "text"},
                {"name": "is_payroll", "type": "boolean"},
                {"name": "employee_status", "type": "boolean"},
                {"name": "adines_number", "type": "identifier", "pii": True},
            ],
        }
    ],
    "functions_allowed": ["COUNT"],
    "policy": {
        "forbidden_topic_terms": {
            "en": ["salary"],
            "tr": ["maaş"],
            "ru": ["зарплата"],
        },
        "pii_redact_columns": ["employees.adines_number"],
        "business_defaults": [["active employees", "employee_status = 'true'"]],
    },
}


def write_doc(tmp_path, doc):
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
    return path


class TestLoadCatalog:
    def test_minimal_round_trip_of_input(self, tmp_path):
        cat = load_catalog(write_doc(tmp_path, MINIMAL_DOC))
        assert cat.version == 3
        assert len(cat.tables) == 1
        assert len(cat.tables[0].columns) == 4
        pii = [c for c in cat.tables[0].columns if c.is_pii]
        assert [c.name for c in pii] == ["adines_number"]

    def test_duplicate_column_name_rejected(self, tmp_path):
        doc = json.loads(json.dumps(MINIMAL_DOC))
        doc["tables"][0]["columns"].append({"name": "role_eng", "type": "text"})
        doc["tables"][0]["columns"].append({"name": "ROLE_ENG", "type": "text"})
        with pytest.raises(CatalogError, match="duplicate column"):
            load_catalog(write_doc(tmp_path, doc))

    def test_dangling_pii_reference_rejected(self, tmp_path):
        doc = json.loads(json.dumps(MINIMAL_DOC))
        doc["tables"][0]["columns"] = [
            c for c in doc["tables"][0]["columns"] if c["name"] != "adines_number"
        ]
        with pytest.raises(CatalogError, match="adines_number"):
            load_catalog(write_doc(tmp_path, doc))

    def test_every_policy_reference_resolves(self, sample_catalog):
        # Exhaustive reference walk over the shipped catalog.
        columns = {
            f"{t.name}.{c.name}".casefold()
            for t in sample_catalog.tables
            for c in t.columns
        }
        for qualified in sample_catalog.policy.pii_redact_columns:
            assert qualified.casefold() in columns
        bare = {c.name.casefold() for t in sample_catalog.tables for c in t.columns}
        for rule in sample_catalog.rules.rules:
            for field_name in rule.fields_involved():
                assert field_name.casefold() in bare

    def test_unknown_semantic_type_rejected(self, tmp_path):
        doc = json.loads(json.dumps(MINIMAL_DOC))
        doc["tables"][0]["columns"][0]["type"] = "varchar"
        with pytest.raises(CatalogError, match="unknown semantic type"):
            load_catalog(write_doc(tmp_path, doc))

    def test_parse_error_carries_location(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"version": 1,\n  "tables": [', encoding="utf-8")
        with pytest.raises(CatalogError, match="line"):
            load_catalog(path)

    def test_empty_forbidden_terms_rejected(self, tmp_path):
        doc = json.loads(json.dumps(MINIMAL_DOC))
        doc["policy"]["forbidden_topic_terms"]["tr"] = []
        with pytest.raises(CatalogError, match="non-empty"):
            load_catalog(write_doc(tmp_path, doc))

    def test_variant_owned_by_two_canonicals_rejected(self):
        doc = json.loads(json.dumps(MINIMAL_DOC))
        doc["canonical_entities"] = {
            "city": {"Moscow": ["Moskva"], "Minsk": ["moskva"]}
        }
        with pytest.raises(CatalogError, match="maps to"):
            parse_catalog_document(doc)

    def test_document_round_trip(self, sample_catalog, tmp_path):
        path = tmp_path / "dumped.json"
        dump_catalog(sample_catalog, path)
        reloaded = load_catalog(path)
        assert reloaded == sample_catalog
        assert catalog_to_document(reloaded) == catalog_to_document(sample_catalog)


class TestSerializeSchema:
    def test_single_table_lexicographic_columns(self, tmp_path):
        text = serialize_schema_for_prompt(load_catalog(write_doc(tmp_path, MINIMAL_DOC)))
        assert text.count("table ") == 1
        lines = [l.strip() for l in text.splitlines() if l.startswith("  ")]
        names = [l.split()[0] for l in lines]
        assert names == sorted(names, key=str.casefold)

    def test_deterministic_bytes(self, sample_catalog):
        assert serialize_schema_for_prompt(sample_catalog) == serialize_schema_for_prompt(
            sample_catalog
        )

    def test_business_default_predicate_verbatim(self, sample_catalog):
        assert "employee_status = 'true'" in serialize_schema_for_prompt(sample_catalog)

    def test_injective_on_column_sets(self, tmp_path):
        doc_b = json.loads(json.dumps(MINIMAL_DOC))
        doc_b["tables"][0]["columns"].append({"name": "extra_col", "type": "text"})
        text_a = serialize_schema_for_prompt(load_catalog(write_doc(tmp_path, MINIMAL_DOC)))
        text_b = serialize_schema_for_prompt(parse_catalog_document(doc_b))
        assert text_a != text_b


class TestCanonicalLookup:
    def test_known_variant(self, sample_catalog):
        assert (
            lookup_canonical(sample_catalog, "school", "ODTÜ")
            == "Middle East Technical University"
        )

    def test_canonical_self_mapping(self, sample_catalog):
        assert (
            lookup_canonical(sample_catalog, "school", "Middle East Technical University")
            == "Middle East Technical University"
        )

    def test_miss_returns_none(self, sample_catalog):
        assert lookup_canonical(sample_catalog, "project", "unknown-project-xyz") is None

    def test_unknown_domain_raises(self, sample_catalog):
        with pytest.raises(UnknownDomainError):
            lookup_canonical(sample_catalog, "planet", "Mars")

    def test_idempotent_on_hit(self, sample_catalog):
        for domain, variant in [
            ("school", "ODTU"),
            ("city", "Moskva"),
            ("project", "gpp project"),
            ("role", "civil engineer"),
        ]:
            first = lookup_canonical(sample_catalog, domain, variant)
            assert first is not None
            assert lookup_canonical(sample_catalog, domain, first) == first

    def test_case_and_whitespace_insensitive(self, sample_catalog):
        assert lookup_canonical(sample_catalog, "city", "  moskva  ") == "Moscow"
