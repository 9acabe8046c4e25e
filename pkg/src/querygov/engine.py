"""Question preprocessing, prompt assembly, and guarded SQL generation.

The language-model provider is pluggable: production uses an HTTP
chat-completion adapter, tests and the demo run scripted providers that are
pure functions of the prompt's question section. Generation re-prompts once
with the guard's rejection reason before giving up.
"""

from __future__ import annotations

import json
import math
import re
import urllib.request
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Protocol

from .catalog import PolicyRules, SchemaCatalog, serialize_schema_for_prompt
from .guard import GuardOutcome
from .results import ResultTable
from .textnorm import fold_key, fold_text, fold_tokens, lower_for, norm_space
from .translation import TranslationError

DEFAULT_TOKEN_BUDGET = 8000
DEFAULT_MAX_ATTEMPTS = 2

REFUSAL_MESSAGE = (
    "This request involves restricted financial or personal data and cannot "
    "be answered."
)

_CYRILLIC_RE = re.compile(r"[Ѐ-ӿ]")
_TURKISH_CHARS = set("çğıöşüÇĞİÖŞÜ")
_TURKISH_STOPWORDS = frozenset(
    "ve bir bu şu için ile kaç hangi nasıl ne mi mu mü kim nerede kaçı var".split()
)
_FENCED_RE = re.compile(r"```(?:sql)?\s*(.*?)```", re.IGNORECASE | re.DOTALL)
_SELECT_RE = re.compile(r"\bselect\b", re.IGNORECASE)


class EngineError(RuntimeError):
    """Provider or orchestration failure; the job moves to the error state."""


class ConfigurationError(ValueError):
    pass


class LlmProvider(Protocol):
    def complete(self, prompt: str) -> str: ...


def approx_token_count(text: str) -> int:
    # chars/4 approximation; close enough for budget enforcement.
    return math.ceil(len(text) / 4)


def detect_language(question: str) -> str:
    if _CYRILLIC_RE.search(question):
        return "ru"
    if any(ch in _TURKISH_CHARS for ch in question):
        return "tr"
    tokens = set(fold_tokens(question))
    if tokens & _TURKISH_STOPWORDS:
        return "tr"
    return "en"


def preprocess_question(question: str) -> tuple[str, str]:
    """Lowercase (Turkish-aware), collapse whitespace, detect the language."""
    stripped = question.strip()
    if not stripped:
        raise ValueError("question is empty")
    language = detect_language(stripped)
    normalized = norm_space(lower_for(stripped, language))
    return normalized, language


def map_entities_to_canonical(text: str, catalog: SchemaCatalog) -> str:
    """Replace known entity variants with canonical forms before translation.

    Greedy longest-first n-gram scan so multi-word variants win over their
    own tokens; keeps domain names like GPP intact through translation.
    """
    indexes = [catalog.domain_variants(d) for d in catalog.canonical]
    words = text.split()
    out: list[str] = []
    i = 0
    while i < len(words):
        replaced = False
        for n in range(min(5, len(words) - i), 0, -1):
            gram = " ".join(words[i : i + n])
            core = gram.strip(".,!?;:()\"'")
            if not core:
                continue
            key = fold_key(core)
            for index in indexes:
                canonical = index.get(key)
                if canonical is not None:
                    head, _, tail = gram.partition(core)
                    out.append(head + canonical + tail)
                    i += n
                    replaced = True
                    break
            if replaced:
                break
        if not replaced:
            out.append(words[i])
            i += 1
    return " ".join(out)


def translate_question(
    question_normalized: str,
    language: str,
    translator,
    catalog: SchemaCatalog,
) -> str:
    mapped = map_entities_to_canonical(question_normalized, catalog)
    if language == "en":
        return mapped
    try:
        return translator.translate(mapped, source_lang=language, target_lang="en")
    except TranslationError as exc:
        raise EngineError(f"question translation failed: {exc}") from exc


@dataclass(frozen=True)
class PromptBundle:
    system_section: str
    schema_section: str
    examples_section: tuple[tuple[str, str], ...]  # (question, sql), best first
    question_section: str
    approx_token_count: int


@dataclass(frozen=True)
class PromptTemplate:
    text: str

    @staticmethod
    def load(path: str | Path) -> "PromptTemplate":
        return PromptTemplate(Path(path).read_text(encoding="utf-8"))

    def render(self, bundle: PromptBundle) -> str:
        if bundle.examples_section:
            examples = "\n".join(
                f"Q: {q}\nSQL: {sql}" for q, sql in bundle.examples_section
            )
        else:
            examples = "(none)"
        return (
            self.text.replace("{rules}", bundle.system_section)
            .replace("{schema}", bundle.schema_section)
            .replace("{examples}", examples)
            .replace("{question}", bundle.question_section)
        )


def render_policy_rules(policy: PolicyRules) -> str:
    lines = [
        f"- {concept!r} means filtering by {predicate}"
        for concept, predicate in policy.business_defaults
    ]
    return "\n".join(lines) if lines else "(no additional rules)"


def assemble_prompt(
    catalog: SchemaCatalog,
    policy: PolicyRules,
    examples: list[tuple[str, str]],
    question: str,
    template: PromptTemplate,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
) -> PromptBundle:
    """Deterministic prompt assembly under the token budget.

    Lowest-similarity examples are dropped first when over budget; the
    system, schema, and question sections are never dropped.
    """
    system_section = render_policy_rules(policy)
    schema_section = serialize_schema_for_prompt(catalog)
    kept = list(examples)
    while True:
        bundle = PromptBundle(
            system_section=system_section,
            schema_section=schema_section,
            examples_section=tuple(kept),
            question_section=question,
            approx_token_count=0,
        )
        count = approx_token_count(template.render(bundle))
        bundle = replace(bundle, approx_token_count=count)
        if count <= token_budget:
            return bundle
        if not kept:
            raise ConfigurationError(
                f"token budget {token_budget} cannot hold the system, schema, "
                f"and question sections ({count} tokens)"
            )
        kept.pop()  # drop the lowest-similarity example


def extract_sql(raw_text: str) -> str | None:
    """First SQL statement in the provider output: fenced block or bare SELECT."""
    fenced = _FENCED_RE.search(raw_text)
    candidate = fenced.group(1) if fenced else raw_text
    match = _SELECT_RE.search(candidate)
    if match is None:
        return None
    statement = candidate[match.start() :]
    # One statement only: cut at the first semicolon.
    semi = statement.find(";")
    if semi != -1:
        statement = statement[: semi + 1]
    return statement.strip()


@dataclass
class GenerationOutcome:
    raw_text: str
    extracted_sql: str | None = None
    attempts: int = 0
    refusal: str | None = None


def question_matches_forbidden(question: str, policy: PolicyRules) -> bool:
    return bool(set(fold_tokens(question)) & policy.forbidden_terms_folded())


def generate_sql(
    bundle: PromptBundle,
    provider: LlmProvider,
    template: PromptTemplate,
    validate: Callable[[str], GuardOutcome],
    policy: PolicyRules | None = None,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> tuple[GenerationOutcome, GuardOutcome | None]:
    """Run the provider with one guarded retry.

    The policy pre-screen fires before any provider call: forbidden-topic
    questions come back as refusals with zero attempts. On a guard rejection
    the provider is re-prompted once with the rejection reason appended.
    """
    if policy is not None and question_matches_forbidden(
        bundle.question_section, policy
    ):
        return (
            GenerationOutcome(
                raw_text="", attempts=0, refusal=REFUSAL_MESSAGE
            ),
            None,
        )

    current = bundle
    outcome = GenerationOutcome(raw_text="")
    guard_outcome: GuardOutcome | None = None
    for attempt in range(1, max_attempts + 1):
        try:
            raw = provider.complete(template.render(current))
        except Exception as exc:
            raise EngineError(f"provider failed: {exc}") from exc
        outcome = GenerationOutcome(raw_text=raw, attempts=attempt)
        sql = extract_sql(raw)
        if sql is None:
            outcome.refusal = raw.strip() or "provider returned no SQL"
            return outcome, None
        outcome.extracted_sql = sql
        guard_outcome = validate(sql)
        if guard_outcome.passed or attempt == max_attempts:
            return outcome, guard_outcome
        reason = "; ".join(
            f"{f.code}: {f.message}" for f in guard_outcome.verdict.findings
        )
        current = replace(
            current,
            question_section=(
                f"{bundle.question_section}\n"
                f"(the previous SQL was rejected: {reason}; produce a corrected statement)"
            ),
        )
    return outcome, guard_outcome


def translate_result(
    table: ResultTable,
    target_language: str,
    translator,
    catalog: SchemaCatalog | None = None,
) -> tuple[ResultTable, bool]:
    """Translate header labels and categorical text cells; numbers untouched.

    Canonical entity tables are consulted first (a canonical form with a
    variant tagged for the target language maps directly); the translation
    provider handles the rest. Provider failure returns the table
    untranslated with the warning flag set.
    """
    if target_language == "en":
        return table, False

    entity_map: dict[str, str] = {}
    if catalog is not None:
        for domain_table in catalog.canonical.values():
            for canonical, variants in domain_table.entries.items():
                for variant in variants:
                    if variant.lang == target_language:
                        entity_map.setdefault(fold_key(canonical), variant.variant)

    def translate_text(value: str) -> str:
        hit = entity_map.get(fold_key(value))
        if hit is not None:
            return hit
        return translator.translate(value, source_lang="en", target_lang=target_language)

    try:
        headers = tuple(
            (translate_text(label), semantic_type)
            for label, semantic_type in table.headers
        )
        numeric = {
            i
            for i, (_, semantic_type) in enumerate(table.headers)
            if semantic_type in ("integer", "decimal")
        }
        rows = tuple(
            tuple(
                cell if i in numeric or not cell else translate_text(cell)
                for i, cell in enumerate(row)
            )
            for row in table.rows
        )
    except TranslationError:
        return table, True
    return ResultTable(headers, rows, table.row_count, table.truncated), False


# -- providers ---------------------------------------------------------------


def question_section_of(prompt: str) -> str:
    """Recover the question section from a rendered prompt (scripted doubles
    key off it so they stay pure functions of the question)."""
    marker = "Question:"
    idx = prompt.rfind(marker)
    if idx == -1:
        return prompt
    section = prompt[idx + len(marker) :]
    sql_marker = section.rfind("SQL:")
    if sql_marker != -1:
        section = section[:sql_marker]
    return section.strip()


class ScriptedProvider:
    """Deterministic provider double: question section -> scripted responses.

    A list value yields one element per attempt (so a retry test can script
    invalid-then-valid); the last element repeats once exhausted.
    """

    def __init__(self, responses: dict[str, str | list[str]], default: str = ""):
        self._responses = dict(responses)
        self._default = default
        self._attempt_counts: dict[str, int] = {}
        self.calls = 0

    def complete(self, prompt: str) -> str:
        self.calls += 1
        # Retry prompts append the rejection reason on its own line.
        question = question_section_of(prompt).splitlines()[0].strip()
        scripted = self._responses.get(question, self._default)
        if isinstance(scripted, str):
            return scripted
        n = self._attempt_counts.get(question, 0)
        self._attempt_counts[question] = n + 1
        return scripted[min(n, len(scripted) - 1)]


class ExampleEchoProvider:
    """Scripted provider whose quality depends on the examples section.

    With examples present it answers with the SQL of the most similar
    example; with none it falls back to a naive guess that misnames columns
    for anything beyond a plain headcount. This is the provider the ablation
    harness uses to demonstrate 0-shot vs 5-shot measurement.
    """

    def __init__(self, fallback_table: str = "employees"):
        self.fallback_table = fallback_table
        self.calls = 0

    def complete(self, prompt: str) -> str:
        self.calls += 1
        match = re.search(r"^Q: .*?\nSQL: (.*?)$", prompt, re.MULTILINE | re.DOTALL)
        examples_start = prompt.find("Validated examples:")
        question = question_section_of(prompt).splitlines()[0].strip()
        if examples_start != -1 and "(none)" not in prompt[examples_start : examples_start + 40]:
            first = re.search(
                r"Q: .*?\nSQL: (.*?)(?:\n\n|\nQ: |\n*Question:)",
                prompt[examples_start:],
                re.DOTALL,
            )
            if first is not None:
                return first.group(1).strip()
        # 0-shot fallback: guess column names straight from the question.
        tokens = fold_tokens(question)
        if "how" in tokens and "many" in tokens:
            guessed = [t for t in tokens if t in ("city", "role", "project", "department")]
            if guessed:
                return (
                    f"SELECT COUNT(*) FROM {self.fallback_table} "
                    f"WHERE {guessed[0]} = '{tokens[-1]}'"
                )
            return f"SELECT COUNT(*) FROM {self.fallback_table}"
        return f"SELECT name FROM {self.fallback_table}"


class HttpChatProvider:
    """HTTP chat-completion adapter.

    Wire format: POST ``{"messages": [{"role": "system"|"user", ...}]}``;
    the response carries ``{"text": ...}``.
    """

    def __init__(self, endpoint: str, model: str = "", temperature: float = 0.0, timeout: float = 30.0):
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.timeout = timeout

    def complete(self, prompt: str) -> str:
        payload = json.dumps(
            {
                "model": self.model,
                "temperature": self.temperature,
                "messages": [{"role": "user", "content": prompt}],
            }
        ).encode("utf-8")
        req = urllib.request.Request(
            self.endpoint, data=payload, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                body = json.loads(resp.read().decode("utf-8"))
        except Exception as exc:
            raise EngineError(f"chat provider failed: {exc}") from exc
        if "text" not in body:
            raise EngineError("chat provider returned no text field")
        return body["text"]
