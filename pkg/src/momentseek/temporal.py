"""Multi-event sequence construction: per-video beam search under an
exponential time-gap decay, then a gated final re-scoring pass.

A candidate sequence scores additively, each event damped by how far it sits
from its predecessor:

    SS = sum_i s_i * exp(-alpha * (t_i - t_{i-1}))        (t_0 := t_1)

so one weak link dents the chain instead of zeroing it. The final pass
multiplies each event by a cross-scorer verdict b_i in [0, 1]; that product
s_i * lambda_i * b_i is a strict gate: semantic, temporal and fine-grained
agreement must all hold for the event to keep its contribution.

Sequences never span videos and timestamps are strictly increasing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Keyframe
from .errors import NegativeGap, NoValidSequence
from .rerank import CrossScorer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TemporalConfig:
    alpha: float = 0.01  # time-gap decay coefficient, 1/seconds
    beam_width: int = 8
    per_event_top_m: int = 20
    max_sequences: int = 5

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.per_event_top_m < 1:
            raise ValueError("per_event_top_m must be >= 1")
        if self.max_sequences < 1:
            raise ValueError("max_sequences must be >= 1")


@dataclass(frozen=True)
class EventCandidate:
    keyframe_id: str
    video_id: str
    t: float  # seconds
    s: float  # fused retrieval score in [0, 1]

    def __post_init__(self):
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"candidate score must be in [0, 1], got {self.s}")
        if self.t < 0:
            raise ValueError("timestamp must be >= 0")


@dataclass(frozen=True)
class SequenceState:
    video_id: str
    events: tuple[tuple[EventCandidate, float], ...]  # (candidate, lambda)
    cumulative: float

    @property
    def last_t(self) -> float:
        return self.events[-1][0].t

    @property
    def keyframe_ids(self) -> tuple[str, ...]:
        return tuple(c.keyframe_id for c, _ in self.events)


@dataclass(frozen=True)
class FinalEvent:
    candidate: EventCandidate
    lam: float
    b: float
    final: float  # s * lambda * b


@dataclass(frozen=True)
class FinalSequence:
    video_id: str
    events: tuple[FinalEvent, ...]
    total_final: float
    duration_s: float

    @property
    def keyframe_ids(self) -> tuple[str, ...]:
        return tuple(e.candidate.keyframe_id for e in self.events)


def decay(alpha: float, dt: float) -> float:
    """exp(-alpha * dt); full weight at dt=0, soft penalty for larger gaps."""
    if dt < 0:
        raise NegativeGap(f"negative time gap {dt}")
    return math.exp(-alpha * dt)


def _beam_key(state: SequenceState):
    return (-state.cumulative, state.last_t, state.events[-1][0].keyframe_id, state.keyframe_ids)


def beam_search(
    per_event_candidates: Sequence[Sequence[EventCandidate]],
    cfg: TemporalConfig = TemporalConfig(),
) -> list[SequenceState]:
    """Rank time-ordered single-video assignments of the K events.

    Per video, the top beam_width partial sequences survive each step (ties:
    earlier final timestamp, then keyframe_id); extensions require a strictly
    later timestamp. Returns the best max_sequences sequences across videos,
    or raises NoValidSequence when no video admits an ordered assignment.
    """
    if not per_event_candidates:
        raise ValueError("need at least one event")

    by_video: list[dict[str, list[EventCandidate]]] = []
    for event_list in per_event_candidates:
        groups: dict[str, list[EventCandidate]] = {}
        for cand in event_list:
            groups.setdefault(cand.video_id, []).append(cand)
        by_video.append(groups)

    eligible = set(by_video[0])
    for groups in by_video[1:]:
        eligible &= set(groups)

    merged: list[SequenceState] = []
    for video_id in sorted(eligible):
        beams = [
            SequenceState(video_id, ((cand, 1.0),), cand.s)
            for cand in by_video[0][video_id]
        ]
        beams.sort(key=_beam_key)
        beams = beams[: cfg.beam_width]
        for step in range(1, len(per_event_candidates)):
            extensions: list[SequenceState] = []
            for beam in beams:
                for cand in by_video[step][video_id]:
                    if cand.t <= beam.last_t:
                        continue
                    lam = decay(cfg.alpha, cand.t - beam.last_t)
                    extensions.append(
                        SequenceState(
                            video_id,
                            beam.events + ((cand, lam),),
                            beam.cumulative + cand.s * lam,
                        )
                    )
            extensions.sort(key=_beam_key)
            beams = extensions[: cfg.beam_width]
            if not beams:
                break
        merged.extend(beams)

    if not merged:
        raise NoValidSequence("no video admits a time-ordered assignment of all events")
    merged.sort(key=_beam_key)
    return merged[: cfg.max_sequences]


def finalize(
    sequences: Sequence[SequenceState],
    query_events: Sequence[str],
    scorer: CrossScorer,
    keyframes: Mapping[str, Keyframe],
) -> tuple[list[FinalSequence], bool]:
    """Gate every event of every sequence by a cross-scorer verdict and
    re-rank by the gated total. Scorer failures fall back to b=1 (which
    preserves the beam ordering) and flag the result degraded."""
    degraded = False
    out: list[FinalSequence] = []
    for seq in sequences:
        if len(query_events) != len(seq.events):
            raise ValueError(
                f"sequence has {len(seq.events)} events, got {len(query_events)} queries"
            )
        events: list[FinalEvent] = []
        for (cand, lam), query in zip(seq.events, query_events):
            try:
                b = scorer.score(query, keyframes[cand.keyframe_id])
                b = min(1.0, max(0.0, float(b)))
            except Exception as e:
                logger.warning("finalize scorer failed for %s: %s", cand.keyframe_id, e)
                b = 1.0
                degraded = True
            events.append(FinalEvent(cand, lam, b, cand.s * lam * b))
        out.append(
            FinalSequence(
                seq.video_id,
                tuple(events),
                total_final=sum(e.final for e in events),
                duration_s=seq.events[-1][0].t - seq.events[0][0].t,
            )
        )
    out.sort(key=lambda s: (-s.total_final, s.events[-1].candidate.t, s.keyframe_ids))
    return out, degraded
