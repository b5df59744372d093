"""Synthetic corpus generator with a planted ground-truth log.

Builds a fully deterministic corpus (fixed seed => byte-identical manifest,
sidecars and log): every keyframe carries a unique caption assembled from a
fixed vocabulary, a known subset of keyframes carries planted OCR strings,
ASR segments cover known spans, and each video hides one multi-event
sequence at known keyframes. The log maps every planted query to its target,
which is what the evaluation harness and the regression thresholds run on.

Layout per video: 10 shots of 6 s, keyframes at +1/+3/+5 within each shot,
5 ASR segments of 10 s, 60 s total.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .corpus import CorpusManifest, Space, write_embeddings
from .embedder import ReferenceTextEmbedder
from .textnorm import tokenize

SEM_A_DIM = 32
SEM_B_DIM = 48

SHOTS_PER_VIDEO = 10
SHOT_LEN_S = 6.0
KEYFRAME_OFFSETS = (1.0, 3.0, 5.0)
ASR_SEGMENTS_PER_VIDEO = 5
ASR_SEGMENT_LEN_S = 10.0

ADJECTIVES = [
    "red", "blue", "green", "yellow", "black", "white", "purple", "orange",
    "silver", "golden", "tiny", "huge", "old", "young", "bright", "dark",
]

SUBJECTS = [
    "woman", "man", "child", "dog", "cat", "bird", "robot", "worker",
    "dancer", "chef", "teacher", "runner", "soldier", "farmer", "nurse",
    "clown", "driver", "painter", "singer", "pilot", "boy", "girl",
    "monk", "athlete",
]

ACTIONS = [
    "holding a sign", "riding a bicycle", "opening a door", "climbing a ladder",
    "painting a wall", "cooking noodles", "reading a book", "throwing a ball",
    "planting a tree", "fixing an engine", "lighting a candle", "pouring water",
    "sweeping the floor", "waving a flag", "cutting paper", "stacking boxes",
    "feeding pigeons", "washing a car", "playing guitar", "drawing a circle",
]

PLACES = [
    "in a park", "on a beach", "in a kitchen", "near a fountain",
    "on a rooftop", "inside a barn", "at a market", "in a classroom",
    "on a bridge", "in a garage", "at a station", "in a garden",
    "on a staircase", "in a stadium", "by a river", "in an office",
]

OCR_WORDS = [
    "PROGRAM", "WELCOME", "NOTICE", "SCHEDULE", "DISCOUNT", "FESTIVAL",
    "CHANNEL", "REPORT", "ELECTION", "WEATHER", "TRAFFIC", "CONCERT",
    "MUSEUM", "LIBRARY", "AIRPORT", "STATION",
]

SPOKEN_PHRASES = [
    "prices are rising quickly",
    "the weather will improve tomorrow",
    "the committee approved the budget",
    "traffic is heavy on the highway",
    "the team won the championship",
    "volunteers planted new trees",
    "the museum opens next week",
    "farmers expect a good harvest",
    "the mayor announced new plans",
    "students finished their projects",
    "engineers repaired the bridge",
    "the festival starts on friday",
]

FILLER_PHRASES = [
    "thank you for watching",
    "we will be right back",
    "stay tuned for more",
    "that is all for today",
    "here is what happened",
    "let us take a look",
]


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def gen_corpus(
    seed: int,
    n_videos: int,
    events_per_video: int = 3,
    out_dir: str | Path = "out",
) -> tuple[CorpusManifest, dict]:
    """Write manifest.jsonl, sidecars and groundtruth.json under out_dir.

    Returns the manifest handle and the ground-truth log (also written to
    disk). Deterministic for a fixed (seed, n_videos, events_per_video).
    """
    if n_videos < 1:
        raise ValueError("n_videos must be >= 1")
    if not (1 <= events_per_video <= SHOTS_PER_VIDEO):
        raise ValueError(f"events_per_video must be in 1..{SHOTS_PER_VIDEO}")

    rng = np.random.Generator(np.random.PCG64(seed))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    used_captions: set[str] = set()

    def fresh_caption() -> str:
        while True:
            caption = " ".join(
                (
                    ADJECTIVES[rng.integers(len(ADJECTIVES))],
                    SUBJECTS[rng.integers(len(SUBJECTS))],
                    ACTIONS[rng.integers(len(ACTIONS))],
                    PLACES[rng.integers(len(PLACES))],
                )
            )
            if caption not in used_captions:
                used_captions.add(caption)
                return caption

    # unique numeric codes keep planted OCR/ASR strings distinctive
    n_codes = n_videos * 4
    codes = [int(c) for c in rng.permutation(np.arange(1000, 1000 + max(9000, n_codes)))[:n_codes]]
    code_iter = iter(codes)

    lines: list[str] = []
    lines.append(
        _dump(
            {
                "kind": "meta",
                "sem_a_dim": SEM_A_DIM,
                "sem_b_dim": SEM_B_DIM,
                "embedding_files": ["embeddings_a.bin", "embeddings_b.bin"],
            }
        )
    )

    gt: dict = {
        "seed": seed,
        "n_videos": n_videos,
        "events_per_video": events_per_video,
        "visual": [],
        "ocr": [],
        "asr": [],
        "temporal": [],
    }
    ocr_lines: list[str] = []
    asr_lines: list[str] = []
    captions: dict[str, str] = {}  # keyframe_id -> caption
    ocr_terms: set[str] = set()
    asr_terms: set[str] = set()
    duration = SHOTS_PER_VIDEO * SHOT_LEN_S

    for vi in range(n_videos):
        video_id = f"v{vi:03d}"
        lines.append(
            _dump(
                {
                    "kind": "video",
                    "video_id": video_id,
                    "title": f"synthetic video {vi:03d}",
                    "duration_s": duration,
                }
            )
        )
        kf_ids: list[str] = []
        kf_at: dict[float, str] = {}
        for sj in range(SHOTS_PER_VIDEO):
            shot_id = f"{video_id}_s{sj:02d}"
            start = sj * SHOT_LEN_S
            lines.append(
                _dump(
                    {
                        "kind": "shot",
                        "shot_id": shot_id,
                        "video_id": video_id,
                        "start_s": start,
                        "end_s": start + SHOT_LEN_S,
                    }
                )
            )
            for ki, off in enumerate(KEYFRAME_OFFSETS):
                kf_id = f"{shot_id}_k{ki}"
                t = start + off
                caption = fresh_caption()
                captions[kf_id] = caption
                kf_ids.append(kf_id)
                kf_at[t] = kf_id
                lines.append(
                    _dump(
                        {
                            "kind": "keyframe",
                            "keyframe_id": kf_id,
                            "shot_id": shot_id,
                            "video_id": video_id,
                            "timestamp_s": t,
                            "caption": caption,
                        }
                    )
                )

        # visual plants: two keyframes queried by their own caption
        for qi in range(2):
            kf_id = kf_ids[int(rng.integers(len(kf_ids)))]
            gt["visual"].append(
                {"query": captions[kf_id], "keyframe_id": kf_id, "video_id": video_id}
            )

        # OCR plants: 3 docs, the first one queried with its quoted text
        ocr_kf_idx = rng.choice(len(kf_ids), size=3, replace=False)
        for oi, idx in enumerate(sorted(int(i) for i in ocr_kf_idx)):
            kf_id = kf_ids[idx]
            text = (
                f"{OCR_WORDS[rng.integers(len(OCR_WORDS))]} "
                f"{OCR_WORDS[rng.integers(len(OCR_WORDS))]} NO-{next(code_iter)}"
            )
            ocr_terms.update(tokenize(text))
            ocr_lines.append(
                _dump(
                    {
                        "kind": "ocr",
                        "doc_id": f"{video_id}_ocr{oi}",
                        "keyframe_id": kf_id,
                        "text": text,
                        "language_tag": "en",
                    }
                )
            )
            if oi == 0:
                gt["ocr"].append(
                    {
                        "query": f'{captions[kf_id]} "{text}"',
                        "text": text,
                        "keyframe_id": kf_id,
                        "video_id": video_id,
                    }
                )

        # ASR segments: 5 per video, one queried via a speech-cue query
        queried_seg = int(rng.integers(ASR_SEGMENTS_PER_VIDEO))
        for ai in range(ASR_SEGMENTS_PER_VIDEO):
            start = ai * ASR_SEGMENT_LEN_S
            mid = start + ASR_SEGMENT_LEN_S / 2.0
            aligned = kf_at[mid]  # midpoints land exactly on a keyframe
            if ai == queried_seg:
                text = f"{SPOKEN_PHRASES[rng.integers(len(SPOKEN_PHRASES))]} case {next(code_iter)}"
                gt["asr"].append(
                    {
                        "query": f"reporter says {text}",
                        "text": text,
                        "keyframe_id": aligned,
                        "video_id": video_id,
                    }
                )
            else:
                text = FILLER_PHRASES[rng.integers(len(FILLER_PHRASES))]
            asr_terms.update(tokenize(text))
            asr_lines.append(
                _dump(
                    {
                        "kind": "asr",
                        "segment_id": f"{video_id}_a{ai}",
                        "video_id": video_id,
                        "start_s": start,
                        "end_s": start + ASR_SEGMENT_LEN_S,
                        "text": text,
                        "aligned_keyframe_id": aligned,
                    }
                )
            )

        # temporal plant: one chain of middle keyframes in consecutive shots
        j0 = int(rng.integers(SHOTS_PER_VIDEO - events_per_video + 1))
        chain = [f"{video_id}_s{sj:02d}_k1" for sj in range(j0, j0 + events_per_video)]
        gt["temporal"].append(
            {
                "video_id": video_id,
                "query": " -> ".join(captions[k] for k in chain),
                "events": [captions[k] for k in chain],
                "keyframe_ids": chain,
            }
        )

    lines.extend(ocr_lines)
    lines.extend(asr_lines)

    gt["counts"] = {
        "videos": n_videos,
        "shots": n_videos * SHOTS_PER_VIDEO,
        "keyframes": n_videos * SHOTS_PER_VIDEO * len(KEYFRAME_OFFSETS),
        "ocr_docs": len(ocr_lines),
        "asr_segments": len(asr_lines),
    }
    gt["vocab"] = {"ocr_terms": len(ocr_terms), "asr_terms": len(asr_terms)}

    manifest_path = out_dir / "manifest.jsonl"
    manifest_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    embedder = ReferenceTextEmbedder({Space.SEM_A: SEM_A_DIM, Space.SEM_B: SEM_B_DIM})
    for space, dim, fname in (
        (Space.SEM_A, SEM_A_DIM, "embeddings_a.bin"),
        (Space.SEM_B, SEM_B_DIM, "embeddings_b.bin"),
    ):
        vecs = {kf_id: embedder.embed(caption, space) for kf_id, caption in captions.items()}
        write_embeddings(out_dir / fname, dim, vecs)

    (out_dir / "groundtruth.json").write_text(
        json.dumps(gt, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return CorpusManifest.at(manifest_path), gt
