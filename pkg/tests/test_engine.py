from __future__ import annotations

import pytest

from querygov.engine import (
    ConfigurationError,
    PromptTemplate,
    REFUSAL_MESSAGE,
    ScriptedProvider,
    assemble_prompt,
    detect_language,
    extract_sql,
    generate_sql,
    preprocess_question,
    question_section_of,
    translate_question,
    translate_result,
)
from querygov.guard import run_guard
from querygov.resources import data_path
from querygov.results import ResultTable
from querygov.translation import default_translator


@pytest.fixture(scope="module")
def template():
    return PromptTemplate.load(data_path("system_prompt.txt"))


class TestPreprocessQuestion:
    def test_trim_and_lowercase(self):
        assert preprocess_question("  How many Civil Engineers?  ") == (
            "how many civil engineers?",
            "en",
        )

    def test_cyrillic_detected_russian(self):
        _, lang = preprocess_question("Сколько инженеров в Москве?")
        assert lang == "ru"

    def test_turkish_detected(self):
        normalized, lang = preprocess_question("GPP projesinde çalışan mühendisler")
        assert lang == "tr"
        assert normalized == "gpp projesinde çalışan mühendisler"

    def test_turkish_dotted_i_lowering(self):
        normalized, lang = preprocess_question("İnsan kaynakları kaç kişi?")
        assert lang == "tr"
        assert normalized.startswith("insan")

    def test_empty_question_rejected(self):
        with pytest.raises(ValueError):
            preprocess_question("   ")

    def test_default_language_english(self):
        assert detect_language("list all employees") == "en"


class TestTranslateQuestion:
    def test_english_passthrough(self, sample_catalog):
        translator = default_translator()
        assert (
            translate_question("how many civil engineers?", "en", translator, sample_catalog)
            == "how many civil engineers?"
        )

    def test_code_switched_entity_survives(self, sample_catalog):
        translator = default_translator()
        out = translate_question(
            "gpp projesinde çalışan mühendisler", "tr", translator, sample_catalog
        )
        assert "GPP" in out

    def test_russian_city_variant_mapped(self, sample_catalog):
        translator = default_translator()
        out = translate_question(
            "сколько инженеров в москва?", "ru", translator, sample_catalog
        )
        assert "Moscow" in out


class TestAssemblePrompt:
    EXAMPLES = [(f"question {i}", f"SELECT {i} FROM t") for i in range(5)]

    def test_five_examples_in_similarity_order(self, sample_catalog, template):
        bundle = assemble_prompt(
            sample_catalog, sample_catalog.policy, list(self.EXAMPLES),
            "how many?", template, token_budget=8000,
        )
        assert bundle.examples_section == tuple(self.EXAMPLES)
        assert bundle.approx_token_count <= 8000

    def test_budget_drops_lowest_similarity_first(self, sample_catalog, template):
        full = assemble_prompt(
            sample_catalog, sample_catalog.policy, list(self.EXAMPLES),
            "how many?", template, token_budget=8000,
        )
        # Squeeze the budget just below the full size: last examples drop first.
        tight = assemble_prompt(
            sample_catalog, sample_catalog.policy, list(self.EXAMPLES),
            "how many?", template, token_budget=full.approx_token_count - 1,
        )
        kept = tight.examples_section
        assert len(kept) < 5
        assert kept == tuple(self.EXAMPLES[: len(kept)])

    def test_zero_shot_mode_valid(self, sample_catalog, template):
        bundle = assemble_prompt(
            sample_catalog, sample_catalog.policy, [], "how many?", template,
        )
        assert bundle.examples_section == ()

    def test_budget_too_small_is_configuration_error(self, sample_catalog, template):
        with pytest.raises(ConfigurationError):
            assemble_prompt(
                sample_catalog, sample_catalog.policy, [], "how many?", template,
                token_budget=10,
            )

    def test_prompt_determinism(self, sample_catalog, template):
        args = (sample_catalog, sample_catalog.policy, list(self.EXAMPLES),
                "how many care workers?", template)
        a = assemble_prompt(*args)
        b = assemble_prompt(*args)
        assert a == b
        assert template.render(a) == template.render(b)

    def test_modes_differ_only_in_examples(self, sample_catalog, template):
        zero = assemble_prompt(sample_catalog, sample_catalog.policy, [], "q?", template)
        five = assemble_prompt(
            sample_catalog, sample_catalog.policy, list(self.EXAMPLES), "q?", template
        )
        assert zero.system_section == five.system_section
        assert zero.schema_section == five.schema_section
        assert zero.question_section == five.question_section
        assert zero.examples_section != five.examples_section


class TestExtractSql:
    def test_fenced_block(self):
        text = "Here you go:\n```sql\nSELECT a FROM t\n```\nanything else"
        assert extract_sql(text) == "SELECT a FROM t"

    def test_bare_statement(self):
        assert extract_sql("SELECT a FROM t WHERE b = 1") == "SELECT a FROM t WHERE b = 1"

    def test_cut_at_semicolon(self):
        assert extract_sql("SELECT a FROM t; SELECT b FROM u") == "SELECT a FROM t;"

    def test_no_sql_returns_none(self):
        assert extract_sql("I cannot answer that question.") is None


class TestGenerateSql:
    def _validator(self, catalog):
        return lambda sql: run_guard(sql, catalog)

    def test_valid_first_attempt(self, sample_catalog, template):
        provider = ScriptedProvider(
            {"how many?": "```sql\nSELECT COUNT(*) FROM employees\n```"}
        )
        bundle = assemble_prompt(sample_catalog, sample_catalog.policy, [], "how many?", template)
        outcome, guard = generate_sql(
            bundle, provider, template, self._validator(sample_catalog),
            policy=sample_catalog.policy,
        )
        assert outcome.attempts == 1
        assert outcome.extracted_sql == "SELECT COUNT(*) FROM employees"
        assert guard.passed

    def test_guarded_retry_then_valid(self, sample_catalog, template):
        provider = ScriptedProvider(
            {
                "how many engineers?": [
                    "SELECT wrong_col FROM employees",
                    "SELECT COUNT(*) FROM employees",
                ]
            }
        )
        bundle = assemble_prompt(
            sample_catalog, sample_catalog.policy, [], "how many engineers?", template
        )
        outcome, guard = generate_sql(
            bundle, provider, template, self._validator(sample_catalog),
            policy=sample_catalog.policy,
        )
        assert outcome.attempts == 2
        assert guard.passed
        assert provider.calls == 2

    def test_forbidden_question_never_reaches_provider(self, sample_catalog, template):
        provider = ScriptedProvider({}, default="SELECT COUNT(*) FROM employees")
        bundle = assemble_prompt(
            sample_catalog, sample_catalog.policy, [],
            "what is the average salary?", template,
        )
        outcome, guard = generate_sql(
            bundle, provider, template, self._validator(sample_catalog),
            policy=sample_catalog.policy,
        )
        assert outcome.refusal == REFUSAL_MESSAGE
        assert outcome.attempts == 0
        assert provider.calls == 0
        assert guard is None

    def test_provider_refusal_surfaced(self, sample_catalog, template):
        provider = ScriptedProvider({}, default="I cannot answer that.")
        bundle = assemble_prompt(sample_catalog, sample_catalog.policy, [], "hmm?", template)
        outcome, guard = generate_sql(
            bundle, provider, template, self._validator(sample_catalog),
        )
        assert outcome.refusal == "I cannot answer that."
        assert outcome.extracted_sql is None


class TestTranslateResult:
    def _table(self):
        return ResultTable(
            headers=(("city", "text"), ("count", "integer")),
            rows=(("Moscow", "4"), ("Ankara", "2")),
            row_count=2,
        )

    def test_english_identity(self, sample_catalog):
        table = self._table()
        out, warn = translate_result(table, "en", default_translator(), sample_catalog)
        assert out is table and not warn

    def test_turkish_header_via_dictionary(self, sample_catalog):
        out, warn = translate_result(
            self._table(), "tr", default_translator(), sample_catalog
        )
        assert out.headers[0][0] == "Şehir"
        assert not warn

    def test_numeric_cells_untouched(self, sample_catalog):
        out, _ = translate_result(self._table(), "tr", default_translator(), sample_catalog)
        assert [row[1] for row in out.rows] == ["4", "2"]

    def test_entity_values_use_canonical_variants(self, sample_catalog):
        out, _ = translate_result(self._table(), "ru", default_translator(), sample_catalog)
        assert out.rows[0][0] == "Москва"

    def test_provider_failure_returns_untranslated_with_warning(self, sample_catalog):
        from querygov.translation import TranslationError

        class Failing:
            def translate(self, *a, **kw):
                raise TranslationError("down")

        table = self._table()
        out, warn = translate_result(table, "tr", Failing(), sample_catalog)
        assert warn and out == table


class TestScriptedProvider:
    def test_pure_function_of_question_section(self, sample_catalog, template):
        provider = ScriptedProvider({"q?": "SELECT 1 FROM t"})
        bundle_a = assemble_prompt(sample_catalog, sample_catalog.policy, [], "q?", template)
        bundle_b = assemble_prompt(
            sample_catalog, sample_catalog.policy,
            [("other", "SELECT COUNT(*) FROM employees")], "q?", template,
        )
        assert provider.complete(template.render(bundle_a)) == provider.complete(
            template.render(bundle_b)
        )

    def test_question_section_recovery(self, sample_catalog, template):
        bundle = assemble_prompt(
            sample_catalog, sample_catalog.policy, [], "how many people?", template
        )
        assert question_section_of(template.render(bundle)) == "how many people?"
