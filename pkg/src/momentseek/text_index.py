"""Positional inverted index over OCR docs and ASR segments.

Four matching strategies contribute to one relevance score per document:

    raw = 4.0 * exact_phrase + 2.0 * full_term + 1.0 * partial + 0.5 * fuzzy

exact_phrase is 0/1 for a contiguous positional match of the whole phrase;
the other three are fractions of query terms, with strict precedence
(exact > prefix > fuzzy) so every term counts at most once. The weights make
any phrase match outrank every non-phrase document (4.0 > 3.5 max), and cap
raw at 6.0. ASR segments score at their aligned keyframe; multiple documents
on one keyframe keep the best-scoring document.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from enum import Enum

from .corpus import CorpusStore
from .errors import EmptyQuery
from .textnorm import tokenize

EXACT_PHRASE_W = 4.0
FULL_TERM_W = 2.0
PARTIAL_W = 1.0
FUZZY_W = 0.5

MIN_PREFIX_LEN = 3
MAX_RAW_SCORE = EXACT_PHRASE_W + FULL_TERM_W


class Channel(str, Enum):
    OCR = "OCR"
    ASR = "ASR"


@dataclass(frozen=True)
class TextQuery:
    raw: str
    terms: tuple[str, ...]
    phrase: str | None = None  # set when the sub-query was quoted / marked exact

    @classmethod
    def parse(cls, raw: str, phrase: str | None = None) -> "TextQuery":
        terms = tuple(tokenize(raw))
        if not terms:
            raise EmptyQuery(f"query {raw!r} has no indexable terms")
        return cls(raw, terms, phrase)


@dataclass(frozen=True)
class TextHit:
    keyframe_id: str
    raw_score: float
    strategy_breakdown: dict[str, float] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class _Doc:
    doc_id: str
    keyframe_id: str
    positions: dict[str, tuple[int, ...]]  # term -> token positions

    @property
    def term_set(self) -> frozenset[str]:
        return frozenset(self.positions)


class TextIndex:
    def __init__(self, docs: list[_Doc]):
        self.docs = {d.doc_id: d for d in docs}
        self.postings: dict[str, set[str]] = {}
        for doc in docs:
            for term in doc.positions:
                self.postings.setdefault(term, set()).add(doc.doc_id)
        self.vocab = sorted(self.postings)

    def __len__(self) -> int:
        return len(self.docs)

    def prefix_terms(self, prefix: str) -> list[str]:
        lo = bisect.bisect_left(self.vocab, prefix)
        hi = bisect.bisect_left(self.vocab, prefix + "￿")
        return self.vocab[lo:hi]


def build_text_index(store: CorpusStore, channel: Channel) -> TextIndex:
    """Index one channel; ASR documents resolve to their aligned keyframe."""
    docs: list[_Doc] = []
    if channel is Channel.OCR:
        source = [(d.doc_id, d.keyframe_id, d.text) for d in store.ocr_docs.values()]
    else:
        source = [
            (a.segment_id, a.aligned_keyframe_id, a.text) for a in store.asr_segments.values()
        ]
    for doc_id, keyframe_id, text in sorted(source):
        positions: dict[str, list[int]] = {}
        for pos, term in enumerate(tokenize(text)):
            positions.setdefault(term, []).append(pos)
        docs.append(_Doc(doc_id, keyframe_id, {t: tuple(p) for t, p in positions.items()}))
    return TextIndex(docs)


def _within_edit_distance(a: str, b: str, max_d: int) -> bool:
    if abs(len(a) - len(b)) > max_d:
        return False
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        cur = [i] + [0] * len(b)
        row_min = cur[0]
        for j in range(1, len(b) + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            row_min = min(row_min, cur[j])
        if row_min > max_d:
            return False
        prev = cur
    return prev[-1] <= max_d


def fuzzy_budget(term: str) -> int:
    """Allowed edit distance by term length: 4-7 chars -> 1, 8+ -> 2, else 0."""
    n = len(term)
    if n >= 8:
        return 2
    if n >= 4:
        return 1
    return 0


def _phrase_match(doc: _Doc, phrase_terms: tuple[str, ...]) -> bool:
    if not phrase_terms:
        return False
    first = doc.positions.get(phrase_terms[0])
    if first is None:
        return False
    rest = [doc.positions.get(t) for t in phrase_terms[1:]]
    if any(p is None for p in rest):
        return False
    rest_sets = [set(p) for p in rest]
    return any(all(p + i + 1 in s for i, s in enumerate(rest_sets)) for p in first)


def _score_doc(doc: _Doc, unique_terms: list[str], phrase_terms: tuple[str, ...]) -> dict[str, float]:
    doc_terms = doc.term_set
    exact = [t for t in unique_terms if t in doc_terms]
    rest = [t for t in unique_terms if t not in doc_terms]
    partial = [
        t
        for t in rest
        if len(t) >= MIN_PREFIX_LEN and any(dt.startswith(t) for dt in doc_terms)
    ]
    rest = [t for t in rest if t not in partial]
    fuzzy = [
        t
        for t in rest
        if fuzzy_budget(t) > 0
        and any(_within_edit_distance(t, dt, fuzzy_budget(t)) for dt in doc_terms)
    ]
    n = len(unique_terms)
    return {
        "exact_phrase": 1.0 if _phrase_match(doc, phrase_terms) else 0.0,
        "full_term": len(exact) / n,
        "partial": len(partial) / n,
        "fuzzy": len(fuzzy) / n,
    }


def search_text(index: TextIndex, q: TextQuery, top_k: int = 100) -> list[TextHit]:
    """Score every candidate document and report the best per keyframe,
    sorted by raw score descending, ties by keyframe_id. Zero-score frames
    are not hits."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    unique_terms = list(dict.fromkeys(q.terms))
    phrase_terms = tuple(tokenize(q.phrase)) if q.phrase else q.terms

    candidate_ids: set[str] = set()
    for term in unique_terms:
        candidate_ids.update(index.postings.get(term, ()))
        if len(term) >= MIN_PREFIX_LEN:
            for vt in index.prefix_terms(term):
                candidate_ids.update(index.postings[vt])
        budget = fuzzy_budget(term)
        if budget:
            for vt in index.vocab:
                if _within_edit_distance(term, vt, budget):
                    candidate_ids.update(index.postings[vt])

    best: dict[str, tuple[float, str, dict[str, float]]] = {}
    for doc_id in sorted(candidate_ids):
        doc = index.docs[doc_id]
        breakdown = _score_doc(doc, unique_terms, phrase_terms)
        raw = (
            EXACT_PHRASE_W * breakdown["exact_phrase"]
            + FULL_TERM_W * breakdown["full_term"]
            + PARTIAL_W * breakdown["partial"]
            + FUZZY_W * breakdown["fuzzy"]
        )
        if raw <= 0.0:
            continue
        prev = best.get(doc.keyframe_id)
        if prev is None or raw > prev[0]:
            best[doc.keyframe_id] = (raw, doc_id, breakdown)

    hits = [
        TextHit(kf_id, raw, breakdown) for kf_id, (raw, _, breakdown) in best.items()
    ]
    hits.sort(key=lambda h: (-h.raw_score, h.keyframe_id))
    return hits[:top_k]
