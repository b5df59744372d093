"""Synthetic benchmark harness: replays the generator's planted queries
through the full pipeline and reports per-task metrics.

The thresholds asserted by the acceptance suite (visual recall@10, quoted-OCR
rank-1 rate, temporal sequence-rank-1 rate) are regression guards on the
deterministic synthetic corpus, not claims about real-world quality.
"""

from __future__ import annotations

import time

from .engine import Engine, SearchRequest


def _recall_at(results, target_id: str, k: int) -> bool:
    return any(c.keyframe_id == target_id for c in results[:k])


def run_eval(engine: Engine, gt: dict, top_k: int = 10) -> dict:
    """Replay every planted query against an engine that already ingested the
    matching corpus; returns the metrics report."""
    search_times: list[float] = []
    temporal_times: list[float] = []

    visual = gt.get("visual", [])
    vis_at1 = vis_at10 = vis_at10_bare = 0
    for entry in visual:
        t0 = time.perf_counter()
        result = engine.search(SearchRequest(query=entry["query"], top_k=top_k))
        search_times.append(time.perf_counter() - t0)
        vis_at1 += _recall_at(result.results, entry["keyframe_id"], 1)
        vis_at10 += _recall_at(result.results, entry["keyframe_id"], top_k)
        bare = engine.search(SearchRequest(query=entry["query"], top_k=top_k, rerank=False))
        vis_at10_bare += _recall_at(bare.results, entry["keyframe_id"], top_k)

    ocr = gt.get("ocr", [])
    ocr_at1 = 0
    for entry in ocr:
        t0 = time.perf_counter()
        result = engine.search(SearchRequest(query=entry["query"], top_k=top_k))
        search_times.append(time.perf_counter() - t0)
        ocr_at1 += _recall_at(result.results, entry["keyframe_id"], 1)

    asr = gt.get("asr", [])
    asr_at1 = asr_at10 = 0
    for entry in asr:
        t0 = time.perf_counter()
        result = engine.search(SearchRequest(query=entry["query"], top_k=top_k))
        search_times.append(time.perf_counter() - t0)
        asr_at1 += _recall_at(result.results, entry["keyframe_id"], 1)
        asr_at10 += _recall_at(result.results, entry["keyframe_id"], top_k)

    temporal = gt.get("temporal", [])
    seq_at1 = 0
    for entry in temporal:
        t0 = time.perf_counter()
        result = engine.temporal_search(entry["query"])
        temporal_times.append(time.perf_counter() - t0)
        if result.sequences and list(result.sequences[0].keyframe_ids) == entry["keyframe_ids"]:
            seq_at1 += 1

    def rate(hits: int, n: int) -> float:
        return round(hits / n, 4) if n else 0.0

    return {
        "seed": gt.get("seed"),
        "corpus": gt.get("counts", {}),
        "visual": {
            "n": len(visual),
            "recall_at_1": rate(vis_at1, len(visual)),
            "recall_at_10": rate(vis_at10, len(visual)),
            "recall_at_10_no_rerank": rate(vis_at10_bare, len(visual)),
        },
        "ocr": {"n": len(ocr), "rank1_rate": rate(ocr_at1, len(ocr))},
        "asr": {
            "n": len(asr),
            "rank1_rate": rate(asr_at1, len(asr)),
            "recall_at_10": rate(asr_at10, len(asr)),
        },
        "temporal": {"n": len(temporal), "seq_rank1_rate": rate(seq_at1, len(temporal))},
        "timings_ms": {
            "search_avg": round(1000 * sum(search_times) / len(search_times), 3)
            if search_times
            else 0.0,
            "temporal_avg": round(1000 * sum(temporal_times) / len(temporal_times), 3)
            if temporal_times
            else 0.0,
        },
    }
