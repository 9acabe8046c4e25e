from __future__ import annotations

import pytest

from querygov.cleaning import (
    FLAG_ENTITY_UNMATCHED,
    FLAG_TRANSLATION_FAILURE,
    CleaningPipeline,
    RawRecord,
    canonicalize_entity,
    validate_record,
)
from querygov.translation import TranslationError

TS = "2024-03-01T10:00:00"

# The five normalization rows the shipped catalog/dictionary/canonical tables
# must reproduce byte-exactly.
TABLE_I_ROWS = [
    ("actual_working_city", "Moskva", "Moscow"),
    ("egitimOkulAdi", "ODTU", "Middle East Technical University"),
    ("egitimOkulAdi", "Orta Dogu Teknik Universitesi", "Middle East Technical University"),
    ("role_eng", "civil engineer", "Civil Engineer"),
    ("c_project_eng", "Gpp", "GPP"),
    ("c_project_eng", "GPP project", "GPP"),
    ("department", "İnsan kaynakları", "Human Resources"),
]


class FailingTranslator:
    def translate(self, text, source_lang=None, target_lang="en"):
        raise TranslationError("scripted outage")


class TestNormalizeTranslation:
    def test_moskva_to_moscow(self, sample_pipeline):
        assert sample_pipeline.normalize_translation("Moskva") == "Moscow"

    def test_turkish_department(self, sample_pipeline):
        assert (
            sample_pipeline.normalize_translation("İnsan kaynakları")
            == "Human Resources"
        )

    def test_already_english_passthrough(self, sample_pipeline):
        assert sample_pipeline.normalize_translation("Moscow") == "Moscow"

    def test_cyrillic_variant_same_output(self, sample_pipeline):
        assert sample_pipeline.normalize_translation("Москва") == "Moscow"


class TestCleanRecord:
    @pytest.mark.parametrize("field,raw,expected", TABLE_I_ROWS)
    def test_table_rows(self, sample_pipeline, field, raw, expected):
        record = sample_pipeline.clean_record(RawRecord("r1", TS, {field: raw}))
        assert record.fields[field] == expected

    def test_single_provenance_entry_for_moskva(self, sample_pipeline):
        record = sample_pipeline.clean_record(
            RawRecord("r1", TS, {"actual_working_city": "Moskva"})
        )
        assert record.fields["actual_working_city"] == "Moscow"
        assert len(record.provenance["actual_working_city"]) == 1

    def test_fixed_point_on_canonical_record(self, sample_pipeline):
        fields = {
            "actual_working_city": "Moscow",
            "role_eng": "Civil Engineer",
            "department": "Engineering",
            "c_project_eng": "GPP",
            "country": "Russia",
            "is_payroll": "true",
            "employee_status": "true",
            "employment_type": "payroll",
        }
        record = sample_pipeline.clean_record(RawRecord("r2", TS, fields))
        assert record.fields == fields
        assert all(not chain for chain in record.provenance.values())
        assert record.flags == []

    def test_idempotence(self, sample_pipeline):
        raw = RawRecord(
            "r3",
            TS,
            {
                "actual_working_city": "Moskva",
                "egitimOkulAdi": "Konya hıghschool",
                "role_eng": "civil enginer",
                "department": "İnsan kaynakları",
                "c_project_eng": "gpp project",
            },
        )
        once = sample_pipeline.clean_record(raw)
        twice = sample_pipeline.clean_record(
            RawRecord("r3", TS, dict(once.fields))
        )
        assert twice.fields == once.fields

    def test_provenance_chains_compose(self, sample_pipeline):
        raw = RawRecord(
            "r4",
            TS,
            {"egitimOkulAdi": "  Konya   hıghschool ", "role_eng": "civil enginer"},
        )
        record = sample_pipeline.clean_record(raw)
        for field, chain in record.provenance.items():
            previous = raw.fields[field]
            for transform in chain:
                assert transform.before == previous
                previous = transform.after
            assert previous == record.fields[field]

    def test_all_raw_fields_present(self, sample_pipeline):
        raw = RawRecord("r5", TS, {"actual_working_city": "", "role_eng": "x"})
        record = sample_pipeline.clean_record(raw)
        assert set(record.fields) == set(raw.fields)

    def test_translation_failure_keeps_raw_value_and_flags(self, sample_catalog, sample_dictionary):
        from querygov.cleaning import load_pipeline_config
        from querygov.resources import data_path

        pipeline = CleaningPipeline(
            sample_catalog,
            load_pipeline_config(data_path("pipeline.json")),
            sample_dictionary,
            FailingTranslator(),
        )
        record = pipeline.clean_record(
            RawRecord("r6", TS, {"department": "Отдел кадров"})
        )
        # Canonicalization still recovers via the variant table.
        assert record.fields["department"] == "Human Resources"
        assert any(f.rule_id == FLAG_TRANSLATION_FAILURE for f in record.flags)

    def test_unmatched_entity_title_cased_and_flagged(self, sample_pipeline):
        record = sample_pipeline.clean_record(
            RawRecord("r7", TS, {"actual_working_city": "zzyzx"})
        )
        assert record.fields["actual_working_city"] == "Zzyzx"
        assert any(f.rule_id == FLAG_ENTITY_UNMATCHED for f in record.flags)


class TestCanonicalizeEntity:
    def test_exact_variant(self, sample_catalog):
        assert canonicalize_entity("project", "Gpp", sample_catalog, 2) == ("GPP", True)

    def test_school_variant(self, sample_catalog):
        assert canonicalize_entity("school", "ODTU", sample_catalog, 2) == (
            "Middle East Technical University",
            True,
        )

    def test_fuzzy_within_distance(self, sample_catalog):
        assert canonicalize_entity("city", "Moskv", sample_catalog, 2) == ("Moscow", True)

    def test_no_match_title_cased(self, sample_catalog):
        assert canonicalize_entity("city", "Zzyzx", sample_catalog, 2) == ("Zzyzx", False)


class TestValidateRecord:
    def _clean(self, pipeline, fields):
        return pipeline.clean_record(RawRecord("r8", TS, fields))

    def test_consistent_record_empty(self, sample_pipeline, sample_catalog):
        record = self._clean(
            sample_pipeline,
            {"country": "Russia", "actual_working_city": "Moscow"},
        )
        assert validate_record(record, sample_catalog.rules) == []

    def test_payroll_inconsistency(self, sample_pipeline, sample_catalog):
        record = self._clean(
            sample_pipeline,
            {"employment_type": "payroll", "is_payroll": "false"},
        )
        violations = validate_record(record, sample_catalog.rules)
        assert [v.rule_id for v in violations] == ["payroll_consistency"]

    def test_role_department_mismatch(self, sample_pipeline, sample_catalog):
        record = self._clean(
            sample_pipeline,
            {"role_eng": "Civil Engineer", "department": "Human Resources"},
        )
        violations = validate_record(record, sample_catalog.rules)
        assert [v.rule_id for v in violations] == ["role_department"]

    def test_record_never_mutated(self, sample_pipeline, sample_catalog):
        record = self._clean(
            sample_pipeline, {"employment_type": "payroll", "is_payroll": "false"}
        )
        before = dict(record.fields)
        validate_record(record, sample_catalog.rules)
        assert record.fields == before

    def test_reject_severity_on_malformed_flag(self, sample_pipeline, sample_catalog):
        record = self._clean(sample_pipeline, {"is_payroll": "yes"})
        violations = validate_record(record, sample_catalog.rules)
        assert any(
            v.rule_id == "payroll_flag_wellformed" and v.severity == "reject"
            for v in violations
        )
