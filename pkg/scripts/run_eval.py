#!/usr/bin/env python3
"""Generate a synthetic corpus, ingest it, and print the benchmark report.

Usage: python scripts/run_eval.py [--seed 42] [--videos 50] [--events 3]
"""

import argparse
import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from momentseek.engine import Engine
from momentseek.evaluation import run_eval
from momentseek.gencorpus import gen_corpus


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--videos", type=int, default=50)
    parser.add_argument("--events", type=int, default=3)
    parser.add_argument("--out", default=None, help="corpus dir (default: temp)")
    args = parser.parse_args()

    out = args.out or tempfile.mkdtemp(prefix="momentseek_eval_")
    manifest, gt = gen_corpus(args.seed, args.videos, args.events, out)
    engine = Engine()
    engine.ingest(manifest.path)
    print(json.dumps(run_eval(engine, gt), indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
