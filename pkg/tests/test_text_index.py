"""Text index: normalization, the four matching strategies with hand-scored
examples, precedence, and score-bound properties."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentseek.corpus import ingest_manifest
from momentseek.errors import EmptyQuery
from momentseek.text_index import (
    Channel,
    TextQuery,
    build_text_index,
    fuzzy_budget,
    search_text,
)
from momentseek.textnorm import tokenize

from conftest import minimal_records, write_manifest


def index_of(tmp_path, ocr_texts: dict[str, str] | None = None,
             asr: list[dict] | None = None, channel=Channel.OCR):
    """Corpus with one keyframe per OCR doc (kf id = doc id + '_kf')."""
    records = minimal_records()
    for i, (doc_id, text) in enumerate(sorted((ocr_texts or {}).items())):
        kf = f"{doc_id}_kf"
        records.append({"kind": "shot", "shot_id": f"sx{i}", "video_id": "v1",
                        "start_s": 0.0, "end_s": 10.0})
        records.append({"kind": "keyframe", "keyframe_id": kf, "shot_id": f"sx{i}",
                        "video_id": "v1", "timestamp_s": 1.0})
        records.append({"kind": "ocr", "doc_id": doc_id, "keyframe_id": kf, "text": text})
    for seg in asr or []:
        records.append(seg)
    path = write_manifest(tmp_path / "m.jsonl", records)
    store = ingest_manifest(path)
    return build_text_index(store, channel)


class TestNormalization:
    def test_tokenize_lowercases_and_splits(self):
        assert tokenize("HELLO World") == ["hello", "world"]

    def test_tokenize_splits_on_non_alnum(self):
        assert tokenize("NO-4217, ok_now") == ["no", "4217", "ok", "now"]

    def test_positions_recorded(self, tmp_path):
        index = index_of(tmp_path, {"d1": "HELLO World"})
        doc = index.docs["d1"]
        assert doc.positions == {"hello": (0,), "world": (1,)}


class TestBuild:
    def test_empty_channel_empty_index(self, tmp_path):
        index = index_of(tmp_path, {})
        assert len(index) == 0
        hits = search_text(index, TextQuery.parse("anything"))
        assert hits == []

    def test_vocabulary_matches_generator_log(self, small_corpus):
        manifest, gt = small_corpus
        store = ingest_manifest(manifest.path)
        ocr_index = build_text_index(store, Channel.OCR)
        asr_index = build_text_index(store, Channel.ASR)
        assert len(ocr_index.vocab) == gt["vocab"]["ocr_terms"]
        assert len(asr_index.vocab) == gt["vocab"]["asr_terms"]

    def test_asr_resolves_to_aligned_keyframe(self, tmp_path):
        asr = [{"kind": "asr", "segment_id": "a1", "video_id": "v1",
                "start_s": 4.0, "end_s": 6.0, "text": "inflation is rising",
                "aligned_keyframe_id": "k1"}]
        index = index_of(tmp_path, asr=asr, channel=Channel.ASR)
        hits = search_text(index, TextQuery.parse("inflation"))
        assert hits[0].keyframe_id == "k1"


class TestScoring:
    def test_exact_phrase_plus_full_term(self, tmp_path):
        index = index_of(tmp_path, {"d1": "apply for financial support today"})
        hits = search_text(index, TextQuery.parse("financial support"))
        assert hits[0].strategy_breakdown == {
            "exact_phrase": 1.0, "full_term": 1.0, "partial": 0.0, "fuzzy": 0.0}
        assert hits[0].raw_score == pytest.approx(6.0)

    def test_prefix_partial_match(self, tmp_path):
        index = index_of(tmp_path, {"d1": "supporting families"})
        hits = search_text(index, TextQuery.parse("support"))
        b = hits[0].strategy_breakdown
        assert b["full_term"] == 0.0 and b["partial"] == 1.0
        assert hits[0].raw_score == pytest.approx(1.0)

    def test_no_near_match_no_hit(self, tmp_path):
        index = index_of(tmp_path, {"d1": "completely unrelated words"})
        assert search_text(index, TextQuery.parse("xyzzy")) == []

    def test_fuzzy_distance_one(self, tmp_path):
        index = index_of(tmp_path, {"d1": "the color of the sky"})
        hits = search_text(index, TextQuery.parse("colour"))  # 6 chars -> d<=1
        assert hits[0].strategy_breakdown["fuzzy"] == 1.0
        assert hits[0].raw_score == pytest.approx(0.5)

    def test_fuzzy_budget_by_length(self):
        assert fuzzy_budget("abc") == 0
        assert fuzzy_budget("abcd") == 1
        assert fuzzy_budget("abcdefg") == 1
        assert fuzzy_budget("abcdefgh") == 2

    def test_short_terms_never_fuzzy(self, tmp_path):
        index = index_of(tmp_path, {"d1": "cat"})
        assert search_text(index, TextQuery.parse("car")) == []

    def test_term_counts_at_most_once(self, tmp_path):
        # "support" matches exactly; must not also count as prefix of
        # "supporting" or fuzzy anything
        index = index_of(tmp_path, {"d1": "support supporting"})
        hits = search_text(index, TextQuery.parse("support"))
        b = hits[0].strategy_breakdown
        assert b["full_term"] == 1.0 and b["partial"] == 0.0 and b["fuzzy"] == 0.0

    def test_mixed_strategies_fractional(self, tmp_path):
        # one exact term + one prefix term over a 2-term query
        index = index_of(tmp_path, {"d1": "financial supporting"})
        hits = search_text(index, TextQuery.parse("financial support"))
        b = hits[0].strategy_breakdown
        assert b["full_term"] == pytest.approx(0.5)
        assert b["partial"] == pytest.approx(0.5)
        # no contiguous phrase "financial support"
        assert b["exact_phrase"] == 0.0
        assert hits[0].raw_score == pytest.approx(2.0 * 0.5 + 1.0 * 0.5)

    def test_phrase_requires_contiguity(self, tmp_path):
        index = index_of(tmp_path, {
            "d1": "financial help and support",
            "d2": "financial support program"})
        hits = search_text(index, TextQuery.parse("financial support"))
        by_id = {h.keyframe_id: h for h in hits}
        assert by_id["d2_kf"].strategy_breakdown["exact_phrase"] == 1.0
        assert by_id["d1_kf"].strategy_breakdown["exact_phrase"] == 0.0
        assert hits[0].keyframe_id == "d2_kf"

    def test_quoted_phrase_field_used(self, tmp_path):
        index = index_of(tmp_path, {"d1": "program financial support here"})
        q = TextQuery.parse("program financial support here extra",
                            phrase="financial support")
        hits = search_text(index, q)
        assert hits[0].strategy_breakdown["exact_phrase"] == 1.0

    def test_multiple_docs_one_keyframe_keep_max(self, tmp_path):
        records = minimal_records()
        records.append({"kind": "ocr", "doc_id": "d1", "keyframe_id": "k1",
                        "text": "support group"})
        records.append({"kind": "ocr", "doc_id": "d2", "keyframe_id": "k1",
                        "text": "financial support"})
        path = write_manifest(tmp_path / "m.jsonl", records)
        index = build_text_index(ingest_manifest(path), Channel.OCR)
        hits = search_text(index, TextQuery.parse("financial support"))
        assert len(hits) == 1
        assert hits[0].raw_score == pytest.approx(6.0)  # best doc wins

    def test_strategy_dominance(self, tmp_path):
        # phrase-matching doc outranks any doc with no phrase and partial terms
        index = index_of(tmp_path, {
            "d1": "financial support",
            "d2": "financially supportive words"})
        hits = search_text(index, TextQuery.parse("financial support"))
        assert hits[0].keyframe_id == "d1_kf"
        assert hits[0].raw_score > hits[1].raw_score

    def test_empty_query_rejected(self):
        with pytest.raises(EmptyQuery):
            TextQuery.parse("!!! ...")


WORDS = st.text(alphabet="abcdefgh", min_size=1, max_size=10)


@given(doc_words=st.lists(WORDS, min_size=1, max_size=12),
       query_words=st.lists(WORDS, min_size=1, max_size=6))
@settings(max_examples=80, deadline=None)
def test_raw_score_bounded_and_deterministic(tmp_path_factory, doc_words, query_words):
    tmp = tmp_path_factory.mktemp("prop")
    index = index_of(tmp, {"d1": " ".join(doc_words)})
    q = TextQuery.parse(" ".join(query_words))
    first = search_text(index, q)
    second = search_text(index, q)
    assert first == second
    for hit in first:
        b = hit.strategy_breakdown
        assert 0.0 < hit.raw_score <= 6.0
        assert b["full_term"] + b["partial"] + b["fuzzy"] <= 1.0 + 1e-12
        assert hit.raw_score == pytest.approx(
            4.0 * b["exact_phrase"] + 2.0 * b["full_term"]
            + 1.0 * b["partial"] + 0.5 * b["fuzzy"])
