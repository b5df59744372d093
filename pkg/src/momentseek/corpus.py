"""Corpus data model: domain records, JSONL manifest ingest/export, binary
embedding sidecars, and the immutable in-memory store shared by all indexes.

Manifest format: UTF-8 JSONL, one object per line, discriminated by `kind`
(meta | video | shot | keyframe | ocr | asr). The meta line comes first and
declares embedding dimensions plus sidecar file paths (relative to the
manifest). Sidecar files map to spaces by position: embedding_files[0] is
SEM_A, embedding_files[1] is SEM_B.

Sidecar format (bit-exact, little-endian): magic "EMB1", u32 dim, u32 count,
then count records of (u16 id-length, UTF-8 id bytes, dim float32 values).
All stored vectors are unit-norm within 1e-6.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    BadMagic,
    DanglingReference,
    DimensionMismatch,
    DuplicateId,
    InvariantViolation,
    MalformedLine,
    NonUnitVector,
    TruncatedFile,
)

MAGIC = b"EMB1"
UNIT_NORM_TOL = 1e-6
MAX_KEYFRAMES_PER_SHOT = 3


class Space(str, Enum):
    """The two dual-encoder embedding spaces."""

    SEM_A = "SEM_A"
    SEM_B = "SEM_B"


@dataclass(frozen=True)
class EmbeddingSpace:
    space_id: Space
    dim: int

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    title: str
    duration_s: float


@dataclass(frozen=True)
class ShotRecord:
    shot_id: str
    video_id: str
    start_s: float
    end_s: float


@dataclass(frozen=True)
class Keyframe:
    keyframe_id: str
    shot_id: str
    video_id: str
    timestamp_s: float
    caption: str | None = None
    image_uri: str | None = None


@dataclass(frozen=True)
class OcrDoc:
    doc_id: str
    keyframe_id: str
    text: str
    language_tag: str | None = None


@dataclass(frozen=True)
class AsrSegment:
    segment_id: str
    video_id: str
    start_s: float
    end_s: float
    text: str
    aligned_keyframe_id: str


def nearest_keyframe(keyframes: Sequence[Keyframe], t: float) -> Keyframe:
    """Keyframe nearest to time t; ties go to the earlier keyframe, then id."""
    return min(keyframes, key=lambda k: (abs(k.timestamp_s - t), k.timestamp_s, k.keyframe_id))


# --- embedding sidecars ---------------------------------------------------


def write_embeddings(path: str | Path, dim: int, vectors: Mapping[str, np.ndarray]) -> None:
    """Write a sidecar file. Vector ids are written in sorted order so the
    output is byte-identical for identical inputs."""
    path = Path(path)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", dim, len(vectors)))
        for vec_id in sorted(vectors):
            vec = np.asarray(vectors[vec_id], dtype=np.float32)
            if vec.shape != (dim,):
                raise DimensionMismatch("?", dim, int(vec.size))
            id_bytes = vec_id.encode("utf-8")
            f.write(struct.pack("<H", len(id_bytes)))
            f.write(id_bytes)
            f.write(vec.tobytes())


def load_embeddings(path: str | Path, space: EmbeddingSpace) -> dict[str, np.ndarray]:
    """Read a sidecar file into {keyframe_id: unit float64 vector}.

    Raises BadMagic, DimensionMismatch, TruncatedFile (short or trailing
    payload) and NonUnitVector (norm off by more than 1e-6).
    """
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise BadMagic(f"{path}: bad magic {data[:4]!r}")
    if len(data) < 12:
        raise TruncatedFile(f"{path}: header incomplete")
    dim, count = struct.unpack_from("<II", data, 4)
    if dim != space.dim:
        raise DimensionMismatch(space.space_id.value, space.dim, dim)
    out: dict[str, np.ndarray] = {}
    offset = 12
    vec_bytes = 4 * dim
    for _ in range(count):
        if offset + 2 > len(data):
            raise TruncatedFile(f"{path}: expected {count} records, got {len(out)}")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + id_len + vec_bytes > len(data):
            raise TruncatedFile(f"{path}: expected {count} records, got {len(out)}")
        vec_id = data[offset : offset + id_len].decode("utf-8")
        offset += id_len
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).astype(np.float64)
        offset += vec_bytes
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise NonUnitVector(vec_id, norm)
        out[vec_id] = vec
    if offset != len(data):
        raise TruncatedFile(f"{path}: {len(data) - offset} trailing bytes after {count} records")
    return out


# --- manifest ingest ------------------------------------------------------


@dataclass(frozen=True)
class CorpusManifest:
    path: Path

    @classmethod
    def at(cls, path: str | Path) -> "CorpusManifest":
        return cls(Path(path))


class CorpusStore:
    """Immutable snapshot of an ingested corpus.

    Built once by ingest_manifest; all indexes read from it concurrently.
    Do not mutate the dicts after construction.
    """

    def __init__(
        self,
        videos: dict[str, VideoRecord],
        shots: dict[str, ShotRecord],
        keyframes: dict[str, Keyframe],
        ocr_docs: dict[str, OcrDoc],
        asr_segments: dict[str, AsrSegment],
        dims: dict[Space, int],
        embeddings: dict[Space, dict[str, np.ndarray]],
        embedding_files: list[str],
    ):
        self.videos = videos
        self.shots = shots
        self.keyframes = keyframes
        self.ocr_docs = ocr_docs
        self.asr_segments = asr_segments
        self.dims = dims
        self.embeddings = embeddings
        self.embedding_files = embedding_files
        by_video: dict[str, list[Keyframe]] = {v: [] for v in videos}
        for kf in keyframes.values():
            by_video[kf.video_id].append(kf)
        self.keyframes_by_video = {
            v: tuple(sorted(kfs, key=lambda k: (k.timestamp_s, k.keyframe_id)))
            for v, kfs in by_video.items()
        }
        for vecs in embeddings.values():
            for arr in vecs.values():
                arr.setflags(write=False)

    def space(self, space_id: Space) -> EmbeddingSpace:
        return EmbeddingSpace(space_id, self.dims[space_id])

    def same_records(self, other: "CorpusStore") -> bool:
        """Id-for-id, field-for-field equality (embeddings compared bitwise)."""
        if (
            self.videos != other.videos
            or self.shots != other.shots
            or self.keyframes != other.keyframes
            or self.ocr_docs != other.ocr_docs
            or self.asr_segments != other.asr_segments
            or self.dims != other.dims
        ):
            return False
        for space in self.embeddings:
            mine, theirs = self.embeddings[space], other.embeddings.get(space, {})
            if mine.keys() != theirs.keys():
                return False
            if any(not np.array_equal(mine[k], theirs[k]) for k in mine):
                return False
        return True


_RECORD_FIELDS = {
    "video": {"video_id", "title", "duration_s"},
    "shot": {"shot_id", "video_id", "start_s", "end_s"},
    "keyframe": {"keyframe_id", "shot_id", "video_id", "timestamp_s"},
    "ocr": {"doc_id", "keyframe_id", "text"},
    "asr": {"segment_id", "video_id", "start_s", "end_s", "text", "aligned_keyframe_id"},
}


def _parse_line(line_no: int, raw: str) -> dict:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as e:
        raise MalformedLine(line_no, f"invalid JSON: {e.msg}") from e
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedLine(line_no, "expected an object with a 'kind' field")
    return obj


def _require(obj: dict, kind: str, line_no: int) -> dict:
    missing = _RECORD_FIELDS[kind] - obj.keys()
    if missing:
        raise MalformedLine(line_no, f"{kind} record missing fields {sorted(missing)}")
    return obj


def ingest_manifest(manifest: CorpusManifest | str | Path) -> CorpusStore:
    """Parse and validate a manifest, returning an immutable store.

    Any violation raises a structured error naming the first offending line;
    a returned store satisfies every record invariant.
    """
    if not isinstance(manifest, CorpusManifest):
        manifest = CorpusManifest.at(manifest)
    path = manifest.path

    videos: dict[str, VideoRecord] = {}
    shots: dict[str, ShotRecord] = {}
    keyframes: dict[str, Keyframe] = {}
    ocr_docs: dict[str, OcrDoc] = {}
    asr_segments: dict[str, AsrSegment] = {}
    lines: dict[str, int] = {}  # id -> defining line, for error reporting
    order: list[tuple[int, str, str]] = []  # (line_no, kind, id) in file order
    meta: dict | None = None

    with open(path, encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            raw = raw.strip()
            if not raw:
                continue
            obj = _parse_line(line_no, raw)
            kind = obj["kind"]
            if line_no == 1 and kind != "meta":
                raise MalformedLine(1, "first line must be the meta record")
            if kind == "meta":
                if meta is not None:
                    raise MalformedLine(line_no, "duplicate meta line")
                for key in ("sem_a_dim", "sem_b_dim", "embedding_files"):
                    if key not in obj:
                        raise MalformedLine(line_no, f"meta missing field {key!r}")
                meta = obj
                continue
            if kind not in _RECORD_FIELDS:
                raise MalformedLine(line_no, f"unknown kind {kind!r}")
            _require(obj, kind, line_no)
            try:
                if kind == "video":
                    rec = VideoRecord(obj["video_id"], obj["title"], float(obj["duration_s"]))
                    rec_id, table = rec.video_id, videos
                elif kind == "shot":
                    rec = ShotRecord(
                        obj["shot_id"], obj["video_id"], float(obj["start_s"]), float(obj["end_s"])
                    )
                    rec_id, table = rec.shot_id, shots
                elif kind == "keyframe":
                    rec = Keyframe(
                        obj["keyframe_id"],
                        obj["shot_id"],
                        obj["video_id"],
                        float(obj["timestamp_s"]),
                        obj.get("caption"),
                        obj.get("image_uri"),
                    )
                    rec_id, table = rec.keyframe_id, keyframes
                elif kind == "ocr":
                    rec = OcrDoc(
                        obj["doc_id"], obj["keyframe_id"], obj["text"], obj.get("language_tag")
                    )
                    rec_id, table = rec.doc_id, ocr_docs
                else:
                    rec = AsrSegment(
                        obj["segment_id"],
                        obj["video_id"],
                        float(obj["start_s"]),
                        float(obj["end_s"]),
                        obj["text"],
                        obj["aligned_keyframe_id"],
                    )
                    rec_id, table = rec.segment_id, asr_segments
            except (TypeError, ValueError) as e:
                raise MalformedLine(line_no, f"bad field value: {e}") from e
            if rec_id in lines:
                raise DuplicateId(rec_id, line_no)
            lines[rec_id] = line_no
            table[rec_id] = rec
            order.append((line_no, kind, rec_id))

    if meta is None:
        raise MalformedLine(0, "manifest has no meta line")

    _validate_records(order, videos, shots, keyframes, ocr_docs, asr_segments)

    dims = {Space.SEM_A: int(meta["sem_a_dim"]), Space.SEM_B: int(meta["sem_b_dim"])}
    files = list(meta["embedding_files"])
    if len(files) > 2:
        raise MalformedLine(1, f"expected at most 2 embedding files, got {len(files)}")
    embeddings: dict[Space, dict[str, np.ndarray]] = {Space.SEM_A: {}, Space.SEM_B: {}}
    for space_id, fname in zip((Space.SEM_A, Space.SEM_B), files):
        vecs = load_embeddings(path.parent / fname, EmbeddingSpace(space_id, dims[space_id]))
        for vec_id in vecs:
            if vec_id not in keyframes:
                raise DanglingReference("embedding", vec_id)
        embeddings[space_id] = vecs

    return CorpusStore(videos, shots, keyframes, ocr_docs, asr_segments, dims, embeddings, files)


def _validate_records(order, videos, shots, keyframes, ocr_docs, asr_segments) -> None:
    kf_count_per_shot: dict[str, int] = {}
    kfs_by_video: dict[str, list[Keyframe]] = {}
    for kf in keyframes.values():
        kfs_by_video.setdefault(kf.video_id, []).append(kf)

    for line_no, kind, rec_id in order:
        if kind == "video":
            v = videos[rec_id]
            if v.duration_s < 0:
                raise InvariantViolation(f"video {rec_id}: negative duration", line_no)
        elif kind == "shot":
            s = shots[rec_id]
            if not (0 <= s.start_s <= s.end_s):
                raise InvariantViolation(f"shot {rec_id}: bad time span", line_no)
            if s.video_id not in videos:
                raise DanglingReference("shot", s.video_id, line_no)
        elif kind == "keyframe":
            k = keyframes[rec_id]
            if k.shot_id not in shots:
                raise DanglingReference("keyframe", k.shot_id, line_no)
            if k.video_id not in videos:
                raise DanglingReference("keyframe", k.video_id, line_no)
            shot = shots[k.shot_id]
            if shot.video_id != k.video_id:
                raise InvariantViolation(
                    f"keyframe {rec_id}: video_id disagrees with its shot", line_no
                )
            if not (shot.start_s <= k.timestamp_s <= shot.end_s):
                raise InvariantViolation(
                    f"keyframe {rec_id}: timestamp outside shot span", line_no
                )
            if k.timestamp_s > videos[k.video_id].duration_s:
                raise InvariantViolation(
                    f"keyframe {rec_id}: timestamp beyond video duration", line_no
                )
            n = kf_count_per_shot.get(k.shot_id, 0) + 1
            if n > MAX_KEYFRAMES_PER_SHOT:
                raise InvariantViolation(
                    f"shot {k.shot_id} has more than {MAX_KEYFRAMES_PER_SHOT} keyframes", line_no
                )
            kf_count_per_shot[k.shot_id] = n
        elif kind == "ocr":
            d = ocr_docs[rec_id]
            if not d.text:
                raise InvariantViolation(f"ocr {rec_id}: empty text", line_no)
            if d.keyframe_id not in keyframes:
                raise DanglingReference("ocr", d.keyframe_id, line_no)
        elif kind == "asr":
            a = asr_segments[rec_id]
            if a.start_s > a.end_s:
                raise InvariantViolation(f"asr {rec_id}: start after end", line_no)
            if not a.text:
                raise InvariantViolation(f"asr {rec_id}: empty text", line_no)
            if a.video_id not in videos:
                raise DanglingReference("asr", a.video_id, line_no)
            if a.aligned_keyframe_id not in keyframes:
                raise DanglingReference("asr", a.aligned_keyframe_id, line_no)
            if a.end_s > videos[a.video_id].duration_s:
                raise InvariantViolation(
                    f"asr {rec_id}: segment ends beyond video duration", line_no
                )
            vid_kfs = kfs_by_video.get(a.video_id, [])
            if not vid_kfs:
                raise InvariantViolation(f"asr {rec_id}: video has no keyframes", line_no)
            expected = nearest_keyframe(vid_kfs, (a.start_s + a.end_s) / 2.0)
            if expected.keyframe_id != a.aligned_keyframe_id:
                raise InvariantViolation(
                    f"asr {rec_id}: aligned to {a.aligned_keyframe_id}, "
                    f"nearest keyframe is {expected.keyframe_id}",
                    line_no,
                )

    for line_no, kind, rec_id in order:
        if kind == "shot" and kf_count_per_shot.get(rec_id, 0) == 0:
            raise InvariantViolation(f"shot {rec_id} has no keyframes", line_no)


# --- manifest export (round-trip support) ---------------------------------


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def export_manifest(store: CorpusStore, path: str | Path) -> Path:
    """Write the store back to manifest + sidecar form.

    Re-ingesting the output yields a store equal to `store` record-for-record.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    files = store.embedding_files or ["embeddings_a.bin", "embeddings_b.bin"]
    with open(path, "w", encoding="utf-8") as f:
        f.write(
            _dump(
                {
                    "kind": "meta",
                    "sem_a_dim": store.dims[Space.SEM_A],
                    "sem_b_dim": store.dims[Space.SEM_B],
                    "embedding_files": files,
                }
            )
            + "\n"
        )
        for v in sorted(store.videos.values(), key=lambda r: r.video_id):
            f.write(
                _dump(
                    {
                        "kind": "video",
                        "video_id": v.video_id,
                        "title": v.title,
                        "duration_s": v.duration_s,
                    }
                )
                + "\n"
            )
        for s in sorted(store.shots.values(), key=lambda r: r.shot_id):
            f.write(
                _dump(
                    {
                        "kind": "shot",
                        "shot_id": s.shot_id,
                        "video_id": s.video_id,
                        "start_s": s.start_s,
                        "end_s": s.end_s,
                    }
                )
                + "\n"
            )
        for k in sorted(store.keyframes.values(), key=lambda r: r.keyframe_id):
            rec = {
                "kind": "keyframe",
                "keyframe_id": k.keyframe_id,
                "shot_id": k.shot_id,
                "video_id": k.video_id,
                "timestamp_s": k.timestamp_s,
            }
            if k.caption is not None:
                rec["caption"] = k.caption
            if k.image_uri is not None:
                rec["image_uri"] = k.image_uri
            f.write(_dump(rec) + "\n")
        for d in sorted(store.ocr_docs.values(), key=lambda r: r.doc_id):
            rec = {
                "kind": "ocr",
                "doc_id": d.doc_id,
                "keyframe_id": d.keyframe_id,
                "text": d.text,
            }
            if d.language_tag is not None:
                rec["language_tag"] = d.language_tag
            f.write(_dump(rec) + "\n")
        for a in sorted(store.asr_segments.values(), key=lambda r: r.segment_id):
            f.write(
                _dump(
                    {
                        "kind": "asr",
                        "segment_id": a.segment_id,
                        "video_id": a.video_id,
                        "start_s": a.start_s,
                        "end_s": a.end_s,
                        "text": a.text,
                        "aligned_keyframe_id": a.aligned_keyframe_id,
                    }
                )
                + "\n"
            )
    for space_id, fname in zip((Space.SEM_A, Space.SEM_B), files):
        write_embeddings(path.parent / fname, store.dims[space_id], store.embeddings[space_id])
    return path
