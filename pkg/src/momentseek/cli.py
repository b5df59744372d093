"""Command-line interface.

Verbs: gen-corpus, ingest, search, temporal, serve, eval. `ingest` validates
a manifest and records its path in a small state file (default
./.momentseek_state.json, override with $MOMENTSEEK_STATE); query verbs
re-ingest from that path — indexes are rebuilt per invocation, there is no
on-disk index persistence.

Exit codes: 0 ok, 2 usage, 3 corpus error, 4 not found, 5 internal.
With --json, failures also emit one machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .config import load_config
from .engine import Engine, SearchRequest
from .errors import (
    BadMagic,
    DanglingReference,
    DimensionMismatch,
    DuplicateId,
    EmptyEvent,
    EmptyQuery,
    InvariantViolation,
    MalformedLine,
    MomentseekError,
    NoCorpus,
    NonUnitVector,
    NoValidSequence,
    TruncatedFile,
)
from .evaluation import run_eval
from .fusion import FusionWeights
from .gencorpus import gen_corpus
from .service import create_app, search_result_to_dict, temporal_result_to_dict

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CORPUS = 3
EXIT_NOT_FOUND = 4
EXIT_INTERNAL = 5

_CORPUS_ERRORS = (
    MalformedLine,
    DanglingReference,
    DuplicateId,
    DimensionMismatch,
    InvariantViolation,
    BadMagic,
    TruncatedFile,
    NonUnitVector,
    NoCorpus,
    FileNotFoundError,
)
_USAGE_ERRORS = (EmptyQuery, EmptyEvent, ValueError)
_NOT_FOUND_ERRORS = (NoValidSequence,)

STATE_ENV_VAR = "MOMENTSEEK_STATE"


def _state_path() -> Path:
    return Path(os.environ.get(STATE_ENV_VAR, ".momentseek_state.json"))


def _save_state(manifest: Path) -> None:
    _state_path().write_text(
        json.dumps({"manifest": str(manifest.resolve())}) + "\n", encoding="utf-8"
    )


def _load_manifest_path(args) -> Path:
    if getattr(args, "manifest", None):
        return Path(args.manifest)
    state = _state_path()
    if not state.exists():
        raise NoCorpus("no corpus ingested (run `momentseek ingest <manifest>` first)")
    manifest = json.loads(state.read_text(encoding="utf-8")).get("manifest")
    if not manifest or not Path(manifest).exists():
        raise NoCorpus(f"recorded manifest {manifest!r} is missing")
    return Path(manifest)


def _build_engine(args) -> Engine:
    cfg = load_config(getattr(args, "config", None))
    engine = Engine(cfg)
    engine.ingest(_load_manifest_path(args))
    return engine


def _parse_weights(spec: str) -> FusionWeights:
    parts = [p.strip() for p in spec.split(",")]
    if len(parts) != 3:
        raise ValueError("--weights expects vis,ocr,asr (e.g. 0.5,0.3,0.2)")
    vis, ocr, asr = (float(p) for p in parts)
    return FusionWeights(w_vis=vis, w_ocr=ocr, w_asr=asr, rationale="cli override")


def cmd_gen_corpus(args) -> int:
    manifest, gt = gen_corpus(args.seed, args.videos, args.events, args.out)
    info = {
        "manifest": str(manifest.path),
        "groundtruth": str(Path(args.out) / "groundtruth.json"),
        "counts": gt["counts"],
    }
    print(json.dumps(info, indent=None if args.json else 2))
    return EXIT_OK


def cmd_ingest(args) -> int:
    cfg = load_config(args.config)
    engine = Engine(cfg)
    store = engine.ingest(args.manifest)
    _save_state(Path(args.manifest))
    info = {
        "manifest": str(Path(args.manifest).resolve()),
        "videos": len(store.videos),
        "shots": len(store.shots),
        "keyframes": len(store.keyframes),
        "ocr_docs": len(store.ocr_docs),
        "asr_segments": len(store.asr_segments),
    }
    print(json.dumps(info, indent=None if args.json else 2))
    return EXIT_OK


def cmd_search(args) -> int:
    engine = _build_engine(args)
    weights = _parse_weights(args.weights) if args.weights else None
    mode = args.mode or ("manual" if weights else "auto")
    request = SearchRequest(
        query=args.query,
        mode=mode,
        manual_weights=weights,
        top_k=args.top_k,
        rerank=not args.no_rerank,
    )
    result = engine.search(request)
    if args.json:
        print(json.dumps(search_result_to_dict(result, engine)))
        return EXIT_OK
    w = result.plan.weights
    print(f"plan: sub_queries={result.plan.sub_queries} "
          f"weights=(vis={w.w_vis}, ocr={w.w_ocr}, asr={w.w_asr})")
    if result.degraded:
        print("warning: degraded response (an external dependency fell back)")
    for rank, cand in enumerate(result.results, start=1):
        kf = engine.keyframe(cand.keyframe_id)
        caption = f"  {kf.caption}" if kf and kf.caption else ""
        print(f"{rank:3d}. {cand.keyframe_id}  fused={cand.fused:.6f}{caption}")
    return EXIT_OK


def cmd_temporal(args) -> int:
    engine = _build_engine(args)
    base = engine.cfg.temporal
    cfg = dataclasses.replace(
        base,
        **{
            k: v
            for k, v in {
                "alpha": args.alpha,
                "beam_width": args.beam,
                "per_event_top_m": args.top_m,
                "max_sequences": args.max_sequences,
            }.items()
            if v is not None
        },
    )
    result = engine.temporal_search(args.query, cfg=cfg, rerank=not args.no_rerank)
    if args.json:
        print(json.dumps(temporal_result_to_dict(result, engine)))
        return EXIT_OK
    for rank, seq in enumerate(result.sequences, start=1):
        print(
            f"{rank}. video={seq.video_id} total={seq.total_final:.6f} "
            f"duration={seq.duration_s:.1f}s"
        )
        for ev in seq.events:
            print(
                f"     t={ev.candidate.t:7.2f}s  {ev.candidate.keyframe_id}"
                f"  s={ev.candidate.s:.4f} lambda={ev.lam:.4f} b={ev.b:.4f}"
            )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    cfg = load_config(args.config)
    engine = Engine(cfg)
    try:
        engine.ingest(_load_manifest_path(args))
    except NoCorpus:
        print("serving without a corpus; search endpoints return 409 until ingest", file=sys.stderr)
    ui_dir = args.ui_dir or str(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    app = create_app(engine, ui_dir=ui_dir)
    host, _, port = args.addr.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))
    return EXIT_OK


def cmd_eval(args) -> int:
    if args.dir:
        manifest = Path(args.dir) / "manifest.jsonl"
        gt_path = Path(args.dir) / "groundtruth.json"
    else:
        manifest = _load_manifest_path(args)
        gt_path = manifest.parent / "groundtruth.json"
    if not gt_path.exists():
        raise NoCorpus(f"ground-truth log not found at {gt_path}")
    gt = json.loads(gt_path.read_text(encoding="utf-8"))
    if args.seed is not None and gt.get("seed") != args.seed:
        raise ValueError(f"log seed {gt.get('seed')} does not match --seed {args.seed}")
    cfg = load_config(args.config)
    engine = Engine(cfg)
    engine.ingest(manifest)
    metrics = run_eval(engine, gt)
    report = json.dumps(metrics, indent=None if args.json else 2)
    print(report)
    if args.out:
        Path(args.out).write_text(report + "\n", encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="momentseek")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("gen-corpus", help="generate a synthetic corpus + ground-truth log")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--videos", type=int, default=50)
    p.add_argument("--events", type=int, default=3)
    p.add_argument("--out", default="out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("ingest", help="validate a manifest and record it as current")
    p.add_argument("manifest")
    p.add_argument("--config", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("search", help="single-moment search")
    p.add_argument("query")
    p.add_argument("--mode", choices=["auto", "manual"], default=None)
    p.add_argument("--weights", default=None, help="vis,ocr,asr (implies manual mode)")
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--no-rerank", action="store_true")
    p.add_argument("--manifest", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("temporal", help="multi-event search: 'e1 -> e2 -> e3'")
    p.add_argument("query")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beam", type=int, default=None)
    p.add_argument("--top-m", type=int, default=None)
    p.add_argument("--max-sequences", type=int, default=None)
    p.add_argument("--no-rerank", action="store_true")
    p.add_argument("--manifest", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_temporal)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default="127.0.0.1:8000")
    p.add_argument("--config", default=None)
    p.add_argument("--manifest", default=None)
    p.add_argument("--ui-dir", default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("eval", help="run the synthetic benchmark against the current corpus")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dir", default=None, help="corpus directory (manifest + groundtruth)")
    p.add_argument("--manifest", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None, help="also write the report to this path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:
        if isinstance(e, _NOT_FOUND_ERRORS):
            code = EXIT_NOT_FOUND
        elif isinstance(e, _CORPUS_ERRORS):
            code = EXIT_CORPUS
        elif isinstance(e, _USAGE_ERRORS):
            code = EXIT_USAGE
        elif isinstance(e, MomentseekError):
            code = EXIT_INTERNAL
        else:
            code = EXIT_INTERNAL
        if getattr(args, "json", False):
            print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        else:
            print(f"error: {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
