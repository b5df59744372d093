import json
from pathlib import Path

import numpy as np
import pytest

from momentseek.corpus import write_embeddings
from momentseek.engine import Engine
from momentseek.gencorpus import gen_corpus


def write_manifest(path: Path, records: list[dict], sem_a_dim=4, sem_b_dim=4,
                   embedding_files=()) -> Path:
    """Test helper: meta line + records, one JSON object per line."""
    lines = [json.dumps({
        "kind": "meta",
        "sem_a_dim": sem_a_dim,
        "sem_b_dim": sem_b_dim,
        "embedding_files": list(embedding_files),
    })]
    lines.extend(json.dumps(r) for r in records)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def minimal_records(caption=None) -> list[dict]:
    """1 video, 1 shot, 1 keyframe; the smallest valid corpus."""
    return [
        {"kind": "video", "video_id": "v1", "title": "t", "duration_s": 10.0},
        {"kind": "shot", "shot_id": "s1", "video_id": "v1", "start_s": 0.0, "end_s": 10.0},
        {"kind": "keyframe", "keyframe_id": "k1", "shot_id": "s1", "video_id": "v1",
         "timestamp_s": 5.0, **({"caption": caption} if caption else {})},
    ]


def unit(vec) -> np.ndarray:
    arr = np.asarray(vec, dtype=np.float64)
    return arr / np.linalg.norm(arr)


def write_unit_vectors(path: Path, dim: int, vectors: dict[str, list[float]]) -> Path:
    write_embeddings(path, dim, {k: unit(v) for k, v in vectors.items()})
    return path


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Deterministic 8-video synthetic corpus shared across module tests."""
    out = tmp_path_factory.mktemp("corpus8")
    manifest, gt = gen_corpus(seed=42, n_videos=8, events_per_video=3, out_dir=out)
    return manifest, gt


@pytest.fixture(scope="session")
def small_engine(small_corpus):
    manifest, _ = small_corpus
    engine = Engine()
    engine.ingest(manifest.path)
    return engine
