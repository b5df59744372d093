"""HTTP JSON API over the engine.

Endpoints: POST /v1/search, POST /v1/temporal, GET /v1/health,
GET /v1/keyframes/{id}. Static UI assets (when built) are served under /.

Status mapping: 400 invalid request, 404 not found / no valid sequence,
409 no corpus loaded, 500 only on internal invariant violations. Optional
external dependencies failing never produce a 5xx; they degrade the
response. All score fields are rounded to 6 decimals at this boundary so
identical requests serialize identically across platforms.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__
from .engine import Engine, SearchRequest, SearchResult, TemporalResult
from .errors import (
    EmptyEvent,
    EmptyQuery,
    MomentseekError,
    NoCorpus,
    NoValidSequence,
)
from .fusion import FusionWeights, ScoredCandidate
from .planner import QueryPlan
from .temporal import FinalSequence, TemporalConfig


def _r6(x: float) -> float:
    return round(float(x), 6)


class WeightsBody(BaseModel):
    vis: float = 0.0
    ocr: float = 0.0
    asr: float = 0.0


class SearchBody(BaseModel):
    query: str
    mode: str = "auto"
    manual_weights: WeightsBody | None = None
    top_k: int = 20
    rerank: bool = True


class TemporalBody(BaseModel):
    query: str | None = None
    events: list[str] | None = None
    alpha: float | None = None
    beam_width: int | None = Field(default=None, alias="beam_width")
    per_event_top_m: int | None = None
    max_sequences: int | None = None
    rerank: bool = True


def candidate_to_dict(c: ScoredCandidate, engine: Engine) -> dict:
    kf = engine.keyframe(c.keyframe_id)
    out = {
        "keyframe_id": c.keyframe_id,
        "raw": {m: _r6(v) for m, v in sorted(c.raw.items())},
        "normalized": {m: _r6(v) for m, v in sorted(c.normalized.items())},
        "fused": _r6(c.fused),
        "cosines": {s: _r6(v) for s, v in sorted(c.cosines.items())},
    }
    if kf is not None:
        out.update(
            video_id=kf.video_id,
            shot_id=kf.shot_id,
            timestamp_s=kf.timestamp_s,
            caption=kf.caption,
            image_uri=kf.image_uri,
        )
    return out


def plan_to_dict(plan: QueryPlan) -> dict:
    return {
        "original": plan.original,
        "expansions": list(plan.expansions),
        "sub_queries": dict(plan.sub_queries),
        "weights": {
            "vis": _r6(plan.weights.w_vis),
            "ocr": _r6(plan.weights.w_ocr),
            "asr": _r6(plan.weights.w_asr),
        },
        "events": list(plan.events) if plan.events else None,
        "rationale": plan.rationale,
        "source": plan.source,
    }


def search_result_to_dict(result: SearchResult, engine: Engine) -> dict:
    return {
        "results": [candidate_to_dict(c, engine) for c in result.results],
        "plan": plan_to_dict(result.plan),
        "degraded": result.degraded,
        "timings_ms": {k: round(v, 3) for k, v in result.timings_ms.items()},
    }


def sequence_to_dict(seq: FinalSequence, engine: Engine) -> dict:
    events = []
    for ev in seq.events:
        kf = engine.keyframe(ev.candidate.keyframe_id)
        events.append(
            {
                "keyframe_id": ev.candidate.keyframe_id,
                "video_id": ev.candidate.video_id,
                "timestamp_s": ev.candidate.t,
                "caption": kf.caption if kf else None,
                "s": _r6(ev.candidate.s),
                "lambda": _r6(ev.lam),
                "b": _r6(ev.b),
                "final": _r6(ev.final),
            }
        )
    return {
        "video_id": seq.video_id,
        "events": events,
        "total_final": _r6(seq.total_final),
        "duration_s": _r6(seq.duration_s),
    }


def temporal_result_to_dict(result: TemporalResult, engine: Engine) -> dict:
    return {
        "sequences": [sequence_to_dict(s, engine) for s in result.sequences],
        "plan": plan_to_dict(result.plan),
        "degraded": result.degraded,
        "timings_ms": {k: round(v, 3) for k, v in result.timings_ms.items()},
    }


def create_app(engine: Engine, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="momentseek", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        detail = [
            {"loc": [str(p) for p in err.get("loc", [])], "msg": str(err.get("msg", ""))}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"error": "invalid request", "detail": detail})

    @app.exception_handler(NoCorpus)
    async def on_no_corpus(request: Request, exc: NoCorpus):
        return JSONResponse(status_code=409, content={"error": "no corpus loaded"})

    @app.exception_handler(NoValidSequence)
    async def on_no_sequence(request: Request, exc: NoValidSequence):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(EmptyQuery)
    @app.exception_handler(EmptyEvent)
    @app.exception_handler(ValueError)
    async def on_bad_request(request: Request, exc: Exception):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(MomentseekError)
    async def on_internal(request: Request, exc: MomentseekError):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    @app.get("/v1/health")
    def health():
        store = engine.store
        corpus = None
        if store is not None:
            corpus = {"videos": len(store.videos), "keyframes": len(store.keyframes)}
        return {"status": "ok", "corpus": corpus, "config": engine.cfg.to_dict()}

    @app.get("/v1/keyframes/{keyframe_id}")
    def get_keyframe(keyframe_id: str):
        kf = engine.keyframe(keyframe_id)
        if kf is None:
            return JSONResponse(status_code=404, content={"error": f"unknown keyframe {keyframe_id}"})
        return {
            "keyframe_id": kf.keyframe_id,
            "shot_id": kf.shot_id,
            "video_id": kf.video_id,
            "timestamp_s": kf.timestamp_s,
            "caption": kf.caption,
            "image_uri": kf.image_uri,
        }

    @app.post("/v1/search")
    def search(body: SearchBody):
        weights = None
        if body.manual_weights is not None:
            weights = FusionWeights(
                w_vis=body.manual_weights.vis,
                w_ocr=body.manual_weights.ocr,
                w_asr=body.manual_weights.asr,
                rationale="manual",
            )
        request = SearchRequest(
            query=body.query,
            mode=body.mode,
            manual_weights=weights,
            top_k=body.top_k,
            rerank=body.rerank,
        )
        return search_result_to_dict(engine.search(request), engine)

    @app.post("/v1/temporal")
    def temporal(body: TemporalBody):
        if (body.query is None) == (body.events is None):
            raise ValueError("provide exactly one of 'query' or 'events'")
        base = engine.cfg.temporal
        cfg = TemporalConfig(
            alpha=base.alpha if body.alpha is None else body.alpha,
            beam_width=base.beam_width if body.beam_width is None else body.beam_width,
            per_event_top_m=(
                base.per_event_top_m if body.per_event_top_m is None else body.per_event_top_m
            ),
            max_sequences=(
                base.max_sequences if body.max_sequences is None else body.max_sequences
            ),
        )
        result = engine.temporal_search(
            body.query if body.query is not None else body.events,
            cfg=cfg,
            rerank=body.rerank,
        )
        return temporal_result_to_dict(result, engine)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
