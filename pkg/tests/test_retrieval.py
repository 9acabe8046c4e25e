from __future__ import annotations

import numpy as np
import pytest

from querygov.embedding import HashingEmbedder, cosine, embed_fallback, EmbeddingError
from querygov.retrieval import (
    CorpusError,
    CorpusFormatError,
    ExamplePair,
    VectorIndex,
    index_add,
    load_corpus,
    persist_corpus,
    retrieve_topk,
)

DIM = 256


def pair(example_id: str, question: str, sql: str = "SELECT COUNT(*) FROM employees") -> ExamplePair:
    return ExamplePair(
        example_id=example_id,
        question_text=question,
        sql_text=sql,
        language_of_origin="en",
        embedding=embed_fallback(question, DIM),
        validated_at="2024-01-01T00:00:00",
    )


def brute_force_topk(index: VectorIndex, query: np.ndarray, k: int):
    """Independent oracle: per-entry float64 dot scan, (-similarity, id) order."""
    q = query.astype(np.float64)
    scored = [
        (float(np.dot(p.embedding.astype(np.float64), q)), p.example_id)
        for p in index.entries()
    ]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return scored[:k]


class TestEmbedFallback:
    def test_deterministic(self):
        a = embed_fallback("how many civil engineers in Moscow", DIM)
        b = embed_fallback("how many civil engineers in Moscow", DIM)
        assert np.array_equal(a, b)

    def test_unit_norm_and_self_cosine(self):
        v = embed_fallback("how many civil engineers in Moscow", DIM)
        assert abs(float(np.linalg.norm(v)) - 1.0) < 1e-6
        assert abs(cosine(v, v) - 1.0) < 1e-6

    def test_one_token_change_strictly_below_one(self):
        a = embed_fallback("how many civil engineers in Moscow", DIM)
        b = embed_fallback("how many civil engineers in Ankara", DIM)
        assert cosine(a, b) < 1.0 - 1e-6

    def test_empty_text_rejected(self):
        with pytest.raises(EmbeddingError, match="empty"):
            embed_fallback("   ", DIM)

    def test_case_fold_invariance(self):
        assert np.array_equal(
            embed_fallback("GPP Project", DIM), embed_fallback("gpp project", DIM)
        )


class TestIndexAdd:
    def test_add_then_self_retrieve(self):
        index = VectorIndex(DIM)
        p = pair("e1", "how many engineers are active?")
        index_add(index, p)
        [(hit, sim)] = retrieve_topk(index, p.embedding, 1)
        assert hit.example_id == "e1"
        assert abs(sim - 1.0) < 1e-6

    def test_guard_failing_sql_rejected(self):
        def validator(sql: str) -> None:
            raise ValueError("no such column")

        index = VectorIndex(DIM, validator=validator)
        with pytest.raises(ValueError, match="no such column"):
            index.add(pair("e1", "q"))
        assert len(index) == 0

    def test_upsert_semantics(self):
        index = VectorIndex(DIM)
        index.add(pair("e1", "question one", "SELECT COUNT(*) FROM employees"))
        index.add(pair("e1", "question one", "SELECT COUNT(*) FROM projects"))
        assert len(index) == 1
        assert index.get("e1").sql_text == "SELECT COUNT(*) FROM projects"

    def test_dimension_mismatch(self):
        index = VectorIndex(DIM)
        bad = ExamplePair(
            "e9", "q", "SELECT 1", "en",
            embedding=embed_fallback("q", DIM // 2),
        )
        with pytest.raises(CorpusError, match="dimension"):
            index.add(bad)

    def test_norm_invariant_enforced(self):
        with pytest.raises(CorpusError, match="norm"):
            ExamplePair("e1", "q", "SELECT 1", "en", embedding=np.ones(DIM, dtype=np.float32))


class TestRetrieveTopk:
    def _populated(self, n: int = 40) -> VectorIndex:
        index = VectorIndex(DIM)
        for i in range(n):
            index.add(pair(f"e{i:03d}", f"question about topic {i} and city {i % 7}"))
        return index

    def test_corpus_of_one(self):
        index = VectorIndex(DIM)
        index.add(pair("only", "a single example"))
        for k in (1, 5, 50):
            hits = retrieve_topk(index, embed_fallback("anything else", DIM), k)
            assert [h.example_id for h, _ in hits] == ["only"]

    def test_k_equals_corpus_size_total_ordering(self):
        index = self._populated(12)
        query = embed_fallback("question about topic 3", DIM)
        hits = retrieve_topk(index, query, 12)
        sims = [s for _, s in hits]
        assert sims == sorted(sims, reverse=True)
        assert len(hits) == 12

    def test_exact_mode_equals_brute_force(self):
        index = self._populated(60)
        for probe in range(25):
            query = embed_fallback(f"question about topic {probe}", DIM)
            got = [(h.example_id, round(s, 6)) for h, s in retrieve_topk(index, query, 5)]
            want = [(i, round(s, 6)) for s, i in brute_force_topk(index, query, 5)]
            assert got == want

    def test_monotone_k_prefix(self):
        index = self._populated(30)
        query = embed_fallback("question about city 2", DIM)
        for k in range(1, 10):
            smaller = [h.example_id for h, _ in retrieve_topk(index, query, k)]
            larger = [h.example_id for h, _ in retrieve_topk(index, query, k + 1)]
            assert larger[:k] == smaller

    def test_empty_index_returns_empty(self):
        assert retrieve_topk(VectorIndex(DIM), embed_fallback("q", DIM), 5) == []

    def test_growth_never_reduces_best_similarity(self):
        index = VectorIndex(DIM)
        index.add(pair("e0", "how many engineers in Moscow"))
        query = embed_fallback("how many engineers in Moscow today", DIM)
        best_before = retrieve_topk(index, query, 1)[0][1]
        for i in range(20):
            index.add(pair(f"n{i}", f"unrelated question {i}"))
            best_after = retrieve_topk(index, query, 1)[0][1]
            assert best_after >= best_before - 1e-9
            best_before = best_after

    def test_approximate_recall(self):
        exact = self._populated(200)
        approx = VectorIndex(DIM, mode="approximate")
        for p in exact.entries():
            approx.add(p)
        hits_total = 0
        want_total = 0
        for probe in range(30):
            query = embed_fallback(f"question about topic {probe} and city {probe % 7}", DIM)
            want = {i for _, i in brute_force_topk(exact, query, 5)}
            got = {h.example_id for h, _ in approx.retrieve(query, 5)}
            want_total += len(want)
            hits_total += len(want & got)
        assert hits_total / want_total >= 0.95


class TestPersistence:
    def test_round_trip_preserves_retrieval(self, tmp_path):
        index = VectorIndex(DIM)
        for i in range(50):
            index.add(pair(f"e{i:03d}", f"question number {i} about employees"))
        path = tmp_path / "corpus.jsonl"
        persist_corpus(index, path)
        loaded = load_corpus(path)
        assert len(loaded) == 50
        for probe in range(10):
            query = embed_fallback(f"question number {probe}", DIM)
            before = [(h.example_id, round(s, 6)) for h, s in index.retrieve(query, 5)]
            after = [(h.example_id, round(s, 6)) for h, s in loaded.retrieve(query, 5)]
            assert before == after

    def test_empty_corpus_round_trip(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        persist_corpus(VectorIndex(DIM), path)
        assert len(load_corpus(path)) == 0

    def test_truncated_file_is_parse_error(self, tmp_path):
        index = VectorIndex(DIM)
        index.add(pair("e1", "q one"))
        path = tmp_path / "corpus.jsonl"
        persist_corpus(index, path)
        text = path.read_text(encoding="utf-8")
        path.write_text(text[: len(text) - 40], encoding="utf-8")
        with pytest.raises(CorpusFormatError):
            load_corpus(path)

    def test_unicode_questions_survive(self, tmp_path):
        index = VectorIndex(DIM)
        index.add(pair("tr1", "GPP projesinde kaç mühendis çalışıyor?"))
        path = tmp_path / "corpus.jsonl"
        persist_corpus(index, path)
        assert load_corpus(path).get("tr1").question_text == (
            "GPP projesinde kaç mühendis çalışıyor?"
        )
