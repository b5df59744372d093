"""momentseek: multimodal moment retrieval over keyframes, OCR and ASR."""

__version__ = "0.1.0"

from .config import EngineConfig, load_config
from .corpus import (
    AsrSegment,
    CorpusManifest,
    CorpusStore,
    EmbeddingSpace,
    Keyframe,
    OcrDoc,
    ShotRecord,
    Space,
    VideoRecord,
    export_manifest,
    ingest_manifest,
    load_embeddings,
)
from .engine import Engine, SearchRequest
from .fusion import FusionWeights, NormalizationConfig, ScoredCandidate, fuse, minmax_normalize
from .gencorpus import gen_corpus
from .planner import PlannerConfig, QueryPlan, plan_llm, plan_rule_based, plan_temporal
from .rerank import CascadeConfig, CrossScorer, ReferenceScorer, RemoteScorer, rerank_candidates
from .temporal import (
    EventCandidate,
    FinalSequence,
    SequenceState,
    TemporalConfig,
    beam_search,
    decay,
    finalize,
)
from .text_index import Channel, TextQuery, build_text_index, search_text
from .vector_index import SpaceHit, SrrfConfig, VectorIndex, srrf_fuse
