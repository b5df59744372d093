"""Second-stage cascade: a pluggable cross-modal scorer re-scores the
first-stage candidates.

The scorer interface is deliberately tiny so a real image-text matching
service can slot in behind `RemoteScorer`; `ReferenceScorer` is the
deterministic stand-in (token Jaccard against the keyframe caption) that
makes the cascade testable end to end — it carries no visual semantics.

Failure semantics are skip-and-log: a candidate whose score is unavailable
keeps its first-stage score and the outcome is flagged degraded, so an
outage never fails the request.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import httpx

from .corpus import Keyframe
from .errors import ScorerFailure
from .fusion import VIS, ScoredCandidate
from .textnorm import token_set

logger = logging.getLogger(__name__)

BLEND_REPLACE = "replace"
BLEND_MULTIPLY = "multiply"


@dataclass(frozen=True)
class CascadeConfig:
    rerank_depth: int = 100
    blend: str = BLEND_REPLACE

    def __post_init__(self):
        if self.rerank_depth < 1:
            raise ValueError("rerank_depth must be >= 1")
        if self.blend not in (BLEND_REPLACE, BLEND_MULTIPLY):
            raise ValueError(f"unknown blend {self.blend!r}")


class CrossScorer:
    """Scores (query text, keyframe) pairs into [0, 1]. Deterministic for
    fixed inputs; implementations must be shareable across threads."""

    def score(self, query_text: str, keyframe: Keyframe) -> float:
        raise NotImplementedError

    def score_batch(
        self, query_text: str, keyframes: Sequence[Keyframe]
    ) -> list[float | None]:
        """Per-item scores; None marks an item the scorer could not score."""
        return [self.score(query_text, kf) for kf in keyframes]


class ConstantScorer(CrossScorer):
    """Fixed output; useful for gating tests and as a no-op validator."""

    def __init__(self, value: float):
        self.value = value

    def score(self, query_text: str, keyframe: Keyframe) -> float:
        return self.value


class ReferenceScorer(CrossScorer):
    """Jaccard similarity of normalized token sets of query and caption."""

    def score(self, query_text: str, keyframe: Keyframe) -> float:
        if not keyframe.caption:
            return 0.0
        q, c = token_set(query_text), token_set(keyframe.caption)
        union = q | c
        if not union:
            return 0.0
        return len(q & c) / len(union)


class RemoteScorer(CrossScorer):
    """HTTP client for an external cross-encoder service.

    Wire format: POST {query, items: [{keyframe_id, image_uri, caption}]}
    -> {scores: [{keyframe_id, score}]}. Scores are clamped to [0, 1];
    timeouts and malformed responses yield None for the affected items.
    """

    def __init__(
        self,
        endpoint: str,
        timeout_s: float = 10.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint
        self._client = httpx.Client(timeout=timeout_s, transport=transport)

    def score(self, query_text: str, keyframe: Keyframe) -> float:
        result = self.score_batch(query_text, [keyframe])[0]
        if result is None:
            raise ScorerFailure([keyframe.keyframe_id], "remote scorer unavailable")
        return result

    def score_batch(
        self, query_text: str, keyframes: Sequence[Keyframe]
    ) -> list[float | None]:
        payload = {
            "query": query_text,
            "items": [
                {
                    "keyframe_id": kf.keyframe_id,
                    "image_uri": kf.image_uri,
                    "caption": kf.caption,
                }
                for kf in keyframes
            ],
        }
        try:
            resp = self._client.post(self.endpoint, json=payload)
            resp.raise_for_status()
            body = resp.json()
            by_id = {
                row["keyframe_id"]: float(row["score"])
                for row in body["scores"]
            }
        except (httpx.HTTPError, KeyError, TypeError, ValueError) as e:
            logger.warning("remote scorer failed: %s", e)
            return [None] * len(keyframes)
        return [
            min(1.0, max(0.0, by_id[kf.keyframe_id])) if kf.keyframe_id in by_id else None
            for kf in keyframes
        ]


@dataclass
class RerankOutcome:
    candidates: list[ScoredCandidate]
    degraded: bool = False
    failed_ids: list[str] | None = None


def rerank_candidates(
    candidates: list[ScoredCandidate],
    query_text: str,
    scorer: CrossScorer,
    keyframes: Mapping[str, Keyframe],
    cfg: CascadeConfig = CascadeConfig(),
) -> RerankOutcome:
    """Re-score the top rerank_depth candidates and re-sort the whole list.

    Under `replace` the visual raw score becomes the scorer output; under
    `multiply` it becomes first-stage score * scorer output. Candidates past
    the depth (and any the scorer failed on) keep their first-stage score.
    Scorer calls per query never exceed rerank_depth.
    """
    head = candidates[: cfg.rerank_depth]
    tail = candidates[cfg.rerank_depth :]
    try:
        scores = scorer.score_batch(query_text, [keyframes[c.keyframe_id] for c in head])
    except Exception as e:  # skip-and-log: availability over strictness
        logger.warning("scorer batch failed (%s); keeping first-stage scores", e)
        scores = [None] * len(head)

    out: list[ScoredCandidate] = []
    failed: list[str] = []
    for cand, score in zip(head, scores):
        new = ScoredCandidate(
            cand.keyframe_id,
            raw=dict(cand.raw),
            normalized=dict(cand.normalized),
            fused=cand.fused,
            cosines=dict(cand.cosines),
        )
        if score is None:
            failed.append(cand.keyframe_id)
        else:
            first_stage = new.raw.get(VIS, 0.0)
            new.raw[VIS] = score if cfg.blend == BLEND_REPLACE else first_stage * score
        out.append(new)
    out.extend(tail)
    out.sort(key=lambda c: (-c.raw.get(VIS, 0.0), c.keyframe_id))
    return RerankOutcome(out, degraded=bool(failed), failed_ids=failed or None)
