"""Exact cosine top-k search over the two embedding spaces, fused by
score-reflected reciprocal rank fusion (SRRF).

The index is a plain matrix scan: corpora here stay small enough (<= 1e5
vectors) that exactness is cheap and buys an airtight oracle contract.
Approximate structures are an extension point, not implemented.

SRRF definition used throughout: SRRF(f) = sum over spaces containing f of
w_space * norm_space(f) / (k0 + rank_space(f)), where norm is the min-max
rescale of the space's cosine list. This is the classic 1/(k0+rank) kernel
scaled by the normalized similarity, so agreeing high-score hits keep their
lead instead of collapsing onto rank positions alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import CorpusStore, Space
from .errors import DimensionMismatch, EmptyIndex
from .fusion import VIS, NormalizationConfig, ScoredCandidate, minmax_normalize


@dataclass(frozen=True)
class SpaceHit:
    keyframe_id: str
    cosine: float
    rank: int  # 1-based within its space's list


@dataclass(frozen=True)
class SrrfConfig:
    k0: float = 60.0
    weight_a: float = 1.0
    weight_b: float = 1.0

    def __post_init__(self):
        if self.k0 <= 0:
            raise ValueError("k0 must be positive")
        for name in ("weight_a", "weight_b"):
            w = getattr(self, name)
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")

    def weight(self, space: Space) -> float:
        return self.weight_a if space is Space.SEM_A else self.weight_b


class VectorIndex:
    """Read-only per-space matrices; safe for concurrent queries."""

    def __init__(self, store: CorpusStore):
        self.dims = dict(store.dims)
        self._ids: dict[Space, np.ndarray] = {}
        self._mats: dict[Space, np.ndarray] = {}
        for space, vecs in store.embeddings.items():
            ids = sorted(vecs)
            self._ids[space] = np.array(ids)
            if ids:
                mat = np.stack([vecs[i] for i in ids]).astype(np.float64)
            else:
                mat = np.zeros((0, self.dims[space]))
            mat.setflags(write=False)
            self._mats[space] = mat

    def size(self, space: Space) -> int:
        return int(self._mats[space].shape[0])

    def search_space(self, query_vec: np.ndarray, space: Space, top_k: int) -> list[SpaceHit]:
        """Exact top-k by cosine; equals a full-scan argsort. Ties break by
        keyframe_id ascending. Raises EmptyIndex / DimensionMismatch."""
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        mat, ids = self._mats[space], self._ids[space]
        if mat.shape[0] == 0:
            raise EmptyIndex(f"no vectors indexed for space {space.value}")
        q = np.asarray(query_vec, dtype=np.float64)
        if q.shape != (self.dims[space],):
            raise DimensionMismatch(space.value, self.dims[space], int(q.size))
        scores = np.clip(mat @ q, -1.0, 1.0)
        order = np.lexsort((ids, -scores))[:top_k]
        return [
            SpaceHit(str(ids[i]), float(scores[i]), rank)
            for rank, i in enumerate(order, start=1)
        ]

    def search_space_multi(
        self, query_vecs: Sequence[np.ndarray], space: Space, top_k: int
    ) -> list[SpaceHit]:
        """Search several query variants and merge by per-keyframe max cosine,
        re-ranking the merged list. One variant reduces to search_space."""
        best: dict[str, float] = {}
        for vec in query_vecs:
            for hit in self.search_space(vec, space, top_k):
                if hit.keyframe_id not in best or hit.cosine > best[hit.keyframe_id]:
                    best[hit.keyframe_id] = hit.cosine
        merged = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
        return [SpaceHit(k, c, rank) for rank, (k, c) in enumerate(merged, start=1)]

    def first_stage(
        self,
        query_vecs: dict[Space, np.ndarray | Sequence[np.ndarray]],
        top_k_per_space: int = 100,
        keep: int = 100,
        srrf: SrrfConfig = SrrfConfig(),
        norm: NormalizationConfig = NormalizationConfig(),
    ) -> list[ScoredCandidate]:
        """Per-space search (multi-variant aware) + SRRF, truncated to `keep`.

        Each candidate records its SRRF score as the raw visual score and the
        per-space cosines it was fused from.
        """
        if keep > top_k_per_space * 2:
            raise ValueError("keep must be <= top_k_per_space * 2")
        hits: dict[Space, list[SpaceHit]] = {}
        for space in (Space.SEM_A, Space.SEM_B):
            vecs = query_vecs.get(space)
            if vecs is None:
                continue
            if isinstance(vecs, np.ndarray) and vecs.ndim == 1:
                vecs = [vecs]
            hits[space] = self.search_space_multi(list(vecs), space, top_k_per_space)
        fused = srrf_fuse(
            hits.get(Space.SEM_A, []), hits.get(Space.SEM_B, []), srrf, norm
        )[:keep]

        cos_by_space = {
            space: {h.keyframe_id: h.cosine for h in space_hits}
            for space, space_hits in hits.items()
        }
        out = []
        for keyframe_id, score in fused:
            cosines = {
                space.value: cos_by_space[space][keyframe_id]
                for space in cos_by_space
                if keyframe_id in cos_by_space[space]
            }
            out.append(
                ScoredCandidate(keyframe_id, raw={VIS: score}, cosines=cosines)
            )
        return out


def srrf_fuse(
    list_a: list[SpaceHit],
    list_b: list[SpaceHit],
    cfg: SrrfConfig = SrrfConfig(),
    norm: NormalizationConfig = NormalizationConfig(),
) -> list[tuple[str, float]]:
    """Fuse two per-space result lists; frames absent from a list contribute
    nothing for it. Output sorted by score descending, ties by keyframe_id."""
    scores: dict[str, float] = {}
    for space, hits in ((Space.SEM_A, list_a), (Space.SEM_B, list_b)):
        if not hits:
            continue
        w = cfg.weight(space)
        normalized = minmax_normalize([(h.keyframe_id, h.cosine) for h in hits], norm)
        for hit, (_, norm_score) in zip(hits, normalized):
            scores[hit.keyframe_id] = scores.get(hit.keyframe_id, 0.0) + (
                w * norm_score / (cfg.k0 + hit.rank)
            )
    return sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
