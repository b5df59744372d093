"""Pipeline orchestration shared by the HTTP service and the CLI.

A query flows: plan -> per-modality branches (visual vector search + SRRF +
optional rerank cascade; OCR and ASR text search) run concurrently -> late
fusion -> ranked candidates. Multi-event queries additionally run one search
per event, then beam search + gated finalization.

Degradation policy: optional external dependencies (LLM planner, remote
cross-scorer) never fail a request. A planner outage falls back to the
rule-based plan; a remote scorer outage re-runs the affected stage with the
deterministic reference scorer. Either sets degraded=True on the result.

The ingested snapshot (store + indexes) is immutable; `ingest` swaps it
atomically, so in-flight queries finish on the snapshot they started with.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .config import EngineConfig
from .corpus import CorpusStore, Keyframe, Space, ingest_manifest
from .embedder import ReferenceTextEmbedder
from .errors import AllEmpty, NoCorpus
from .fusion import ASR, OCR, VIS, FusionWeights, ScoredCandidate, fuse
from .planner import (
    SOURCE_LLM_FALLBACK,
    QueryPlan,
    plan as plan_query,
    plan_rule_based,
    plan_temporal,
)
from .rerank import CrossScorer, ReferenceScorer, RemoteScorer, rerank_candidates
from .temporal import EventCandidate, FinalSequence, TemporalConfig, beam_search, finalize
from .text_index import Channel, TextIndex, TextQuery, build_text_index, search_text
from .vector_index import VectorIndex

MODE_AUTO = "auto"
MODE_MANUAL = "manual"


@dataclass(frozen=True)
class SearchRequest:
    query: str
    mode: str = MODE_AUTO
    manual_weights: FusionWeights | None = None
    top_k: int = 20
    rerank: bool = True

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.mode not in (MODE_AUTO, MODE_MANUAL):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_MANUAL and self.manual_weights is None:
            raise ValueError("manual mode requires manual_weights")


@dataclass
class SearchResult:
    results: list[ScoredCandidate]
    plan: QueryPlan
    degraded: bool
    timings_ms: dict[str, float] = field(default_factory=dict)


@dataclass
class TemporalResult:
    sequences: list[FinalSequence]
    plan: QueryPlan
    degraded: bool
    timings_ms: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class _Snapshot:
    store: CorpusStore
    vectors: VectorIndex
    ocr_index: TextIndex
    asr_index: TextIndex
    embedder: ReferenceTextEmbedder


class Engine:
    def __init__(
        self,
        cfg: EngineConfig | None = None,
        llm_transport: httpx.BaseTransport | None = None,
        scorer_transport: httpx.BaseTransport | None = None,
    ):
        self.cfg = cfg or EngineConfig()
        self._llm_transport = llm_transport
        self._snapshot: _Snapshot | None = None
        self._executor = ThreadPoolExecutor(max_workers=4, thread_name_prefix="branch")
        self._reference_scorer = ReferenceScorer()
        self._remote_scorer = (
            RemoteScorer(
                self.cfg.scorer.endpoint,
                timeout_s=self.cfg.scorer.timeout_s,
                transport=scorer_transport,
            )
            if self.cfg.scorer.endpoint
            else None
        )

    # --- corpus lifecycle -------------------------------------------------

    def ingest(self, manifest_path: str | Path) -> CorpusStore:
        """Build a fresh snapshot and swap it in atomically."""
        store = ingest_manifest(manifest_path)
        snapshot = _Snapshot(
            store=store,
            vectors=VectorIndex(store),
            ocr_index=build_text_index(store, Channel.OCR),
            asr_index=build_text_index(store, Channel.ASR),
            embedder=ReferenceTextEmbedder(store.dims),
        )
        self._snapshot = snapshot
        return store

    @property
    def store(self) -> CorpusStore | None:
        snap = self._snapshot
        return snap.store if snap else None

    def _require_snapshot(self) -> _Snapshot:
        snap = self._snapshot
        if snap is None:
            raise NoCorpus("no corpus ingested")
        return snap

    def keyframe(self, keyframe_id: str) -> Keyframe | None:
        snap = self._require_snapshot()
        return snap.store.keyframes.get(keyframe_id)

    # --- single-moment search ----------------------------------------------

    def search(self, request: SearchRequest) -> SearchResult:
        snap = self._require_snapshot()
        timings: dict[str, float] = {}
        t_start = time.perf_counter()
        degraded = False

        t0 = time.perf_counter()
        if request.mode == MODE_MANUAL:
            plan = QueryPlan(
                original=request.query,
                expansions=(request.query,),
                sub_queries={VIS: request.query},
                weights=request.manual_weights,
                rationale="manual weights",
                source="manual",
            )
        else:
            plan = plan_query(request.query, self.cfg.planner, transport=self._llm_transport)
            degraded = degraded or plan.source == SOURCE_LLM_FALLBACK
        timings["plan"] = (time.perf_counter() - t0) * 1000

        per_modality, vis_candidates, branch_degraded, branch_timings = self._run_branches(
            snap, plan, rerank=request.rerank
        )
        degraded = degraded or branch_degraded
        timings.update(branch_timings)

        t0 = time.perf_counter()
        try:
            results = fuse(
                per_modality, plan.weights, self.cfg.normalization, top_k=request.top_k
            )
        except AllEmpty:
            results = []
        timings["fuse"] = (time.perf_counter() - t0) * 1000

        cosines = {c.keyframe_id: c.cosines for c in vis_candidates}
        for cand in results:
            cand.cosines = cosines.get(cand.keyframe_id, {})

        timings["total"] = (time.perf_counter() - t_start) * 1000
        return SearchResult(results, plan, degraded, timings)

    def _run_branches(
        self, snap: _Snapshot, plan: QueryPlan, rerank: bool
    ) -> tuple[dict, list[ScoredCandidate], bool, dict[str, float]]:
        jobs = {}
        if VIS in plan.sub_queries:
            jobs[VIS] = self._executor.submit(self._visual_branch, snap, plan, rerank)
        if OCR in plan.sub_queries:
            jobs[OCR] = self._executor.submit(
                self._text_branch, snap.ocr_index, plan.sub_queries[OCR], True
            )
        if ASR in plan.sub_queries:
            jobs[ASR] = self._executor.submit(
                self._text_branch, snap.asr_index, plan.sub_queries[ASR], False
            )

        per_modality: dict[str, list[tuple[str, float]]] = {}
        vis_candidates: list[ScoredCandidate] = []
        degraded = False
        timings: dict[str, float] = {}
        for modality, job in jobs.items():
            t0 = time.perf_counter()
            try:
                result = job.result()
            except Exception:
                # a failed branch degrades the response instead of failing it
                per_modality[modality] = []
                degraded = True
                continue
            finally:
                timings[modality] = (time.perf_counter() - t0) * 1000
            if modality == VIS:
                vis_candidates, vis_degraded = result
                degraded = degraded or vis_degraded
                per_modality[VIS] = [
                    (c.keyframe_id, c.raw[VIS]) for c in vis_candidates
                ]
            else:
                per_modality[modality] = [(h.keyframe_id, h.raw_score) for h in result]
        return per_modality, vis_candidates, degraded, timings

    def _visual_branch(
        self, snap: _Snapshot, plan: QueryPlan, rerank: bool
    ) -> tuple[list[ScoredCandidate], bool]:
        sub_query = plan.sub_queries[VIS]
        texts = list(dict.fromkeys([sub_query, *plan.expansions[1:]]))
        query_vecs = {
            space: [snap.embedder.embed(t, space) for t in texts]
            for space in (Space.SEM_A, Space.SEM_B)
        }
        candidates = snap.vectors.first_stage(
            query_vecs,
            top_k_per_space=self.cfg.search.top_k_per_space,
            keep=self.cfg.search.first_stage_keep,
            srrf=self.cfg.srrf,
            norm=self.cfg.normalization,
        )
        if not rerank or not candidates:
            return candidates, False
        candidates, degraded = self._rerank_with_fallback(snap, candidates, sub_query)
        return candidates, degraded

    def _rerank_with_fallback(
        self, snap: _Snapshot, candidates: list[ScoredCandidate], query_text: str
    ) -> tuple[list[ScoredCandidate], bool]:
        """Remote scorer first (when configured); on any failure re-run the
        cascade with the reference scorer so results match the reference path."""
        keyframes = snap.store.keyframes
        if self._remote_scorer is not None:
            outcome = rerank_candidates(
                candidates, query_text, self._remote_scorer, keyframes, self.cfg.cascade
            )
            if not outcome.degraded:
                return outcome.candidates, False
            outcome = rerank_candidates(
                candidates, query_text, self._reference_scorer, keyframes, self.cfg.cascade
            )
            return outcome.candidates, True
        outcome = rerank_candidates(
            candidates, query_text, self._reference_scorer, keyframes, self.cfg.cascade
        )
        return outcome.candidates, outcome.degraded

    def _text_branch(self, index: TextIndex, sub_query: str, exact: bool):
        q = TextQuery.parse(sub_query, phrase=sub_query if exact else None)
        return search_text(index, q, top_k=self.cfg.search.first_stage_keep)

    # --- temporal search ----------------------------------------------------

    def temporal_search(
        self,
        query: str | list[str],
        cfg: TemporalConfig | None = None,
        rerank: bool = True,
    ) -> TemporalResult:
        snap = self._require_snapshot()
        tcfg = cfg or self.cfg.temporal
        timings: dict[str, float] = {}
        t_start = time.perf_counter()

        plan = plan_temporal(query, self.cfg.planner)
        events = list(plan.events or ())
        degraded = False

        t0 = time.perf_counter()
        per_event: list[list[EventCandidate]] = []
        for event_text in events:
            candidates, event_degraded = self._event_candidates(snap, event_text, tcfg, rerank)
            degraded = degraded or event_degraded
            per_event.append(candidates)
        timings["events"] = (time.perf_counter() - t0) * 1000

        t0 = time.perf_counter()
        sequences = beam_search(per_event, tcfg)
        timings["beam"] = (time.perf_counter() - t0) * 1000

        t0 = time.perf_counter()
        final, finalize_degraded = self._finalize_with_fallback(snap, sequences, events)
        degraded = degraded or finalize_degraded
        timings["finalize"] = (time.perf_counter() - t0) * 1000

        timings["total"] = (time.perf_counter() - t_start) * 1000
        return TemporalResult(final, plan, degraded, timings)

    def _event_candidates(
        self, snap: _Snapshot, event_text: str, tcfg: TemporalConfig, rerank: bool
    ) -> tuple[list[EventCandidate], bool]:
        """Full single-query pipeline for one event, truncated to the
        per-event pool; fused scores rescale by the active weight mass so
        each candidate's s lands in [0, 1]."""
        event_plan = plan_rule_based(event_text, self.cfg.planner)
        per_modality, _, degraded, _ = self._run_branches(snap, event_plan, rerank)
        try:
            fused = fuse(
                per_modality,
                event_plan.weights,
                self.cfg.normalization,
                top_k=tcfg.per_event_top_m,
            )
        except AllEmpty:
            return [], degraded
        weight_mass = sum(
            event_plan.weights.get(m) for m, lst in per_modality.items() if lst
        )
        out = []
        for cand in fused:
            s = cand.fused / weight_mass if weight_mass > 0 else 0.0
            kf = snap.store.keyframes[cand.keyframe_id]
            out.append(
                EventCandidate(
                    keyframe_id=kf.keyframe_id,
                    video_id=kf.video_id,
                    t=kf.timestamp_s,
                    s=min(1.0, max(0.0, s)),
                )
            )
        return out, degraded

    def _finalize_with_fallback(self, snap, sequences, events):
        keyframes = snap.store.keyframes
        if self._remote_scorer is not None:
            final, degraded = finalize(sequences, events, self._remote_scorer, keyframes)
            if not degraded:
                return final, False
            final, _ = finalize(sequences, events, self._reference_scorer, keyframes)
            return final, True
        return finalize(sequences, events, self._reference_scorer, keyframes)

    def scorer(self) -> CrossScorer:
        return self._remote_scorer or self._reference_scorer
