"""Score normalization and adaptive weighted late fusion.

Per-modality raw scores live on incomparable scales (cosines, text relevance,
reranker probabilities), so each modality's list is min-max rescaled into
[0, 1] before a weighted sum merges them. Weights come from the query planner
(or a manual override) and deliberately carry no sum-to-one constraint:
ranking within one query is scale-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AllEmpty

VIS = "vis"
OCR = "ocr"
ASR = "asr"
MODALITIES = (VIS, OCR, ASR)


@dataclass(frozen=True)
class NormalizationConfig:
    """epsilon keeps the rescale denominator positive; test builds may set it
    to 0 to check exact affine invariance."""

    epsilon: float = 1e-6

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")


@dataclass(frozen=True)
class FusionWeights:
    w_vis: float = 0.0
    w_ocr: float = 0.0
    w_asr: float = 0.0
    rationale: str = ""

    def __post_init__(self):
        for name in ("w_vis", "w_ocr", "w_asr"):
            w = getattr(self, name)
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {w}")

    def get(self, modality: str) -> float:
        return {VIS: self.w_vis, OCR: self.w_ocr, ASR: self.w_asr}[modality]


@dataclass
class ScoredCandidate:
    """A keyframe with raw, normalized and fused scores.

    `raw` holds each modality's pre-normalization score (the visual entry is
    the rank-fusion score, replaced by the reranker when the cascade runs);
    `cosines` keeps the per-space similarities from the first stage.
    """

    keyframe_id: str
    raw: dict[str, float] = field(default_factory=dict)
    normalized: dict[str, float] = field(default_factory=dict)
    fused: float = 0.0
    cosines: dict[str, float] = field(default_factory=dict)


def minmax_normalize(
    scores: list[tuple[str, float]], cfg: NormalizationConfig = NormalizationConfig()
) -> list[tuple[str, float]]:
    """Rescale (id, score) pairs to [0, 1] preserving input order.

    out = (s - min) / (max - min + epsilon). A singleton list maps to 1.0
    (the item is its own maximum); a flat multi-item list maps to all 0.0
    (zero numerator), which silently mutes that modality.
    """
    if not scores:
        return []
    if len(scores) == 1:
        return [(scores[0][0], 1.0)]
    values = [s for _, s in scores]
    lo, hi = min(values), max(values)
    denom = hi - lo + cfg.epsilon
    if denom <= 0.0:
        return [(i, 0.0) for i, _ in scores]
    return [(i, (s - lo) / denom) for i, s in scores]


def fuse(
    per_modality: dict[str, list[tuple[str, float]]],
    weights: FusionWeights,
    cfg: NormalizationConfig = NormalizationConfig(),
    top_k: int | None = None,
) -> list[ScoredCandidate]:
    """Normalize each modality independently and rank the id union by the
    weighted sum; a frame missing from a modality contributes 0 there.

    Ties break by keyframe_id ascending. Raises AllEmpty when no modality
    has any scores.
    """
    if all(not lst for lst in per_modality.values()):
        raise AllEmpty("no modality produced any candidates")

    candidates: dict[str, ScoredCandidate] = {}
    for modality, scores in per_modality.items():
        if not scores:
            continue
        best: dict[str, float] = {}
        for frame_id, s in scores:  # defensive de-dup, keep max
            if frame_id not in best or s > best[frame_id]:
                best[frame_id] = s
        items = list(best.items())
        normalized = minmax_normalize(items, cfg)
        w = weights.get(modality)
        for (frame_id, raw_s), (_, norm_s) in zip(items, normalized):
            cand = candidates.get(frame_id)
            if cand is None:
                cand = candidates[frame_id] = ScoredCandidate(frame_id)
            cand.raw[modality] = raw_s
            cand.normalized[modality] = norm_s
            cand.fused += w * norm_s

    ranked = sorted(candidates.values(), key=lambda c: (-c.fused, c.keyframe_id))
    return ranked if top_k is None else ranked[:top_k]
