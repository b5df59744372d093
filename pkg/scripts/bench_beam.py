#!/usr/bin/env python3
"""Beam-width/decay sweep: how often does pruned beam search still find the
exhaustive optimum, and how large is the score gap when it does not?

Usage: python scripts/bench_beam.py [--instances 500] [--seed 0]
"""

import argparse
import itertools
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from momentseek.errors import NoValidSequence
from momentseek.temporal import EventCandidate, TemporalConfig, beam_search


def exhaustive_best(per_event, alpha: float) -> float | None:
    videos = set(c.video_id for c in per_event[0])
    for event in per_event[1:]:
        videos &= set(c.video_id for c in event)
    best = None
    for video_id in videos:
        pools = [[c for c in ev if c.video_id == video_id] for ev in per_event]
        for combo in itertools.product(*pools):
            times = [c.t for c in combo]
            if any(b <= a for a, b in zip(times, times[1:])):
                continue
            score = combo[0].s
            for prev, cur in zip(combo, combo[1:]):
                score += cur.s * math.exp(-alpha * (cur.t - prev.t))
            best = score if best is None else max(best, score)
    return best


def make_instance(rng, k, m):
    return [
        [EventCandidate(f"e{e}c{j}", "v0", float(rng.uniform(0, 120)),
                        float(rng.uniform(0, 1))) for j in range(m)]
        for e in range(k)
    ]


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--instances", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--alpha", type=float, default=0.01)
    args = parser.parse_args()

    rng = np.random.Generator(np.random.PCG64(args.seed))
    instances = []
    while len(instances) < args.instances:
        k = int(rng.integers(2, 4))
        m = int(rng.integers(3, 7))
        per_event = make_instance(rng, k, m)
        best = exhaustive_best(per_event, args.alpha)
        if best is not None:
            instances.append((per_event, best))

    print(f"alpha={args.alpha}  instances={len(instances)} (K in 2..3, M in 3..6)")
    print(f"{'B':>4} {'equal':>8} {'mean gap':>10} {'max gap':>10}")
    for width in (1, 2, 4, 8, 16, 32):
        equal = 0
        gaps = []
        for per_event, best in instances:
            try:
                out = beam_search(per_event, TemporalConfig(
                    alpha=args.alpha, beam_width=width))
                score = out[0].cumulative
            except NoValidSequence:
                score = 0.0
            if abs(score - best) <= 1e-9:
                equal += 1
            else:
                gaps.append(best - score)
        mean_gap = sum(gaps) / len(gaps) if gaps else 0.0
        max_gap = max(gaps) if gaps else 0.0
        print(f"{width:>4} {equal / len(instances):>8.3f} {mean_gap:>10.4f} {max_gap:>10.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
