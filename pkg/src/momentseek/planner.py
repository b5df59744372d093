"""Query planning: expansion variants plus modality decomposition with
weights.

Two interchangeable planners produce the same QueryPlan shape:

* `plan_rule_based` — deterministic reference rules. Quoted spans route to
  OCR, a speech-cue keyword routes the trailing clause to ASR, whatever
  remains is the visual sub-query. Expansion variants come from a fixed
  synonym/word-order table. Weight constants live in PlannerConfig, not in
  code.
* `plan_llm` — client for an external planner service speaking a small JSON
  contract; responses are validated and clamped, and on outage or schema
  violation the configured fallback policy applies.

The reference expansion slot 0 is the identity (this planner cannot
translate); an LLM backend is responsible for real translation. Only the
visual sub-query is expanded.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace

import httpx

from .errors import EmptyEvent, EmptyQuery, LlmUnavailable, SchemaViolation
from .fusion import ASR, OCR, VIS, FusionWeights
from .textnorm import tokenize

SOURCE_RULE_BASED = "rule_based"
SOURCE_LLM = "llm"
SOURCE_LLM_FALLBACK = "llm_fallback"

FALLBACK_RULE_BASED = "rule_based"
FALLBACK_FAIL = "fail"

SPEECH_CUES = ("says", "said", "mentions", "speech", "lyrics", "announces")
EVENT_DELIMITER = "->"

_QUOTED_RE = re.compile(r'"([^"]*)"')
_CUE_RE = re.compile(r"\b(" + "|".join(SPEECH_CUES) + r")\b", re.IGNORECASE)

SYNONYMS = {
    "car": "automobile", "kid": "child", "child": "kid", "big": "large",
    "small": "tiny", "man": "gentleman", "woman": "lady", "dog": "hound",
    "cat": "feline", "bird": "fowl", "house": "building", "road": "street",
    "fast": "quick", "happy": "joyful", "sad": "unhappy", "red": "crimson",
    "blue": "azure", "green": "emerald", "old": "elderly", "young": "youthful",
    "holding": "carrying", "riding": "mounting", "reading": "studying",
    "cooking": "preparing", "throwing": "tossing", "walking": "strolling",
    "running": "sprinting", "jumping": "leaping", "talking": "speaking",
    "singing": "chanting", "playing": "performing", "watching": "observing",
    "sign": "placard", "ball": "sphere", "book": "volume", "tree": "plant",
    "water": "liquid", "wall": "barrier", "door": "gate", "ladder": "steps",
    "candle": "lamp", "flag": "banner", "paper": "sheet", "box": "crate",
    "guitar": "instrument", "circle": "ring", "beach": "shore",
    "mountain": "peak", "street": "avenue", "photo": "picture",
}

_REORDER_ADJECTIVES = frozenset(
    {
        "red", "blue", "green", "yellow", "black", "white", "purple", "orange",
        "silver", "golden", "tiny", "huge", "old", "young", "bright", "dark",
        "big", "small", "little", "large", "tall", "short",
    }
)


@dataclass(frozen=True)
class PlannerConfig:
    n_expansions: int = 4
    llm_endpoint: str | None = None
    llm_timeout_s: float = 15.0
    fallback: str = FALLBACK_RULE_BASED
    # rule constants (tunable without touching planner code)
    ocr_weight: float = 0.7
    asr_weight: float = 0.6
    vis_weight: float = 0.5
    vis_solo_weight: float = 0.8

    def __post_init__(self):
        if self.n_expansions < 1:
            raise ValueError("n_expansions must be >= 1")
        if self.fallback not in (FALLBACK_RULE_BASED, FALLBACK_FAIL):
            raise ValueError(f"unknown fallback policy {self.fallback!r}")


@dataclass(frozen=True)
class QueryPlan:
    original: str
    expansions: tuple[str, ...]
    sub_queries: dict[str, str]
    weights: FusionWeights
    events: tuple[str, ...] | None = None
    rationale: str = ""
    source: str = SOURCE_RULE_BASED

    def __post_init__(self):
        if not self.expansions:
            raise ValueError("a plan carries at least one expansion")
        if not self.sub_queries:
            raise ValueError("a plan carries at least one sub-query")


def _synonym_variant(text: str) -> str:
    return " ".join(SYNONYMS.get(tok, tok) for tok in tokenize(text))


def _reorder_variant(text: str) -> str:
    tokens = tokenize(text)
    if len(tokens) < 2:
        return " ".join(tokens)
    for i in range(len(tokens) - 1):
        if tokens[i] in _REORDER_ADJECTIVES:
            tokens[i], tokens[i + 1] = tokens[i + 1], tokens[i]
            return " ".join(tokens)
    return " ".join(tokens[1:] + tokens[:1])


_VARIANT_TRANSFORMS = (
    _synonym_variant,
    _reorder_variant,
    lambda t: _synonym_variant(_reorder_variant(t)),
    lambda t: _reorder_variant(_synonym_variant(t)),
)


def expansion_variants(base: str, count: int) -> list[str]:
    """`count` deterministic rewrites of `base` (synonym table + reorders)."""
    return [_VARIANT_TRANSFORMS[k % len(_VARIANT_TRANSFORMS)](base) for k in range(count)]


def plan_rule_based(query: str, cfg: PlannerConfig = PlannerConfig()) -> QueryPlan:
    """Deterministic decomposition; identical query yields an identical plan."""
    if not query or not tokenize(query):
        raise EmptyQuery("query is empty after normalization")

    fired: list[str] = []
    sub_queries: dict[str, str] = {}

    quoted = [m.group(1).strip() for m in _QUOTED_RE.finditer(query)]
    quoted = [q for q in quoted if tokenize(q)]
    if quoted:
        sub_queries[OCR] = " ".join(quoted)
        fired.append(f"quoted span routed to OCR (w={cfg.ocr_weight})")
    residual = _QUOTED_RE.sub(" ", query)

    cue = _CUE_RE.search(residual)
    if cue:
        clause = residual[cue.end():].strip(" \t,.;:!?")
        if tokenize(clause):
            sub_queries[ASR] = clause
            fired.append(f"speech cue {cue.group(1)!r} routed to ASR (w={cfg.asr_weight})")
            residual = residual[: cue.start()]

    residual = residual.strip(" \t,.;:!?")
    if tokenize(residual):
        sub_queries[VIS] = residual
    elif not sub_queries:
        sub_queries[VIS] = query.strip()

    vis_weight = 0.0
    if VIS in sub_queries:
        solo = OCR not in sub_queries and ASR not in sub_queries
        vis_weight = cfg.vis_solo_weight if solo else cfg.vis_weight
        fired.append(
            "visual-only query" + f" (w={vis_weight})"
            if solo
            else f"residual text routed to visual (w={vis_weight})"
        )

    weights = FusionWeights(
        w_vis=vis_weight,
        w_ocr=cfg.ocr_weight if OCR in sub_queries else 0.0,
        w_asr=cfg.asr_weight if ASR in sub_queries else 0.0,
        rationale="; ".join(fired),
    )
    base = sub_queries.get(VIS, query)
    expansions = (query,) + tuple(expansion_variants(base, cfg.n_expansions - 1))
    return QueryPlan(
        original=query,
        expansions=expansions,
        sub_queries=sub_queries,
        weights=weights,
        rationale="; ".join(fired),
        source=SOURCE_RULE_BASED,
    )


def _clamp(x, lo=0.0, hi=1.0) -> float:
    return min(hi, max(lo, float(x)))


def _parse_llm_plan(query: str, body: dict, cfg: PlannerConfig) -> QueryPlan:
    if not isinstance(body, dict):
        raise SchemaViolation("response is not an object")
    expansions = body.get("expansions")
    if not isinstance(expansions, list) or not all(isinstance(e, str) for e in expansions):
        raise SchemaViolation("expansions must be a list of strings")
    expansions = [e for e in expansions if e.strip()]
    if not expansions:
        raise SchemaViolation("expansions is empty")
    expansions = expansions[: cfg.n_expansions]
    while len(expansions) < cfg.n_expansions:
        expansions.append(expansions[0])

    raw_subs = body.get("sub_queries")
    if not isinstance(raw_subs, dict):
        raise SchemaViolation("sub_queries must be an object")
    sub_queries = {
        m: str(raw_subs[m]).strip()
        for m in (VIS, OCR, ASR)
        if raw_subs.get(m) and str(raw_subs[m]).strip()
    }
    if not sub_queries:
        raise SchemaViolation("no sub_query present")

    raw_weights = body.get("weights")
    if not isinstance(raw_weights, dict):
        raise SchemaViolation("weights must be an object")
    try:
        weights = FusionWeights(
            w_vis=_clamp(raw_weights.get(VIS, 0.0)),
            w_ocr=_clamp(raw_weights.get(OCR, 0.0)),
            w_asr=_clamp(raw_weights.get(ASR, 0.0)),
            rationale=str(body.get("rationale", "")),
        )
    except (TypeError, ValueError) as e:
        raise SchemaViolation(f"bad weights: {e}") from e

    events = None
    if body.get("events") is not None:
        raw_events = body["events"]
        if not isinstance(raw_events, list) or not all(
            isinstance(e, str) and e.strip() for e in raw_events
        ):
            raise SchemaViolation("events must be a list of non-empty strings")
        events = tuple(e.strip() for e in raw_events)

    return QueryPlan(
        original=query,
        expansions=tuple(expansions),
        sub_queries=sub_queries,
        weights=weights,
        events=events,
        rationale=str(body.get("rationale", "")),
        source=SOURCE_LLM,
    )


def plan_llm(
    query: str,
    cfg: PlannerConfig,
    transport: httpx.BaseTransport | None = None,
) -> QueryPlan:
    """Ask the configured external planner; validate, clamp, pad/truncate.

    On outage or schema violation the fallback policy either substitutes the
    rule-based plan (marked source="llm_fallback") or re-raises.
    """
    if not query or not tokenize(query):
        raise EmptyQuery("query is empty after normalization")
    try:
        if not cfg.llm_endpoint:
            raise LlmUnavailable("no llm_endpoint configured")
        payload = {"query": query, "n_expansions": cfg.n_expansions, "schema_version": "1"}
        try:
            with httpx.Client(timeout=cfg.llm_timeout_s, transport=transport) as client:
                resp = client.post(cfg.llm_endpoint, json=payload)
                resp.raise_for_status()
                body = resp.json()
        except httpx.HTTPError as e:
            raise LlmUnavailable(str(e)) from e
        except json.JSONDecodeError as e:
            raise SchemaViolation(f"invalid JSON: {e}") from e
        return _parse_llm_plan(query, body, cfg)
    except (LlmUnavailable, SchemaViolation):
        if cfg.fallback == FALLBACK_RULE_BASED:
            fallback_plan = plan_rule_based(query, cfg)
            return replace(fallback_plan, source=SOURCE_LLM_FALLBACK)
        raise


def plan(
    query: str,
    cfg: PlannerConfig = PlannerConfig(),
    transport: httpx.BaseTransport | None = None,
) -> QueryPlan:
    """LLM planner when an endpoint is configured, else the reference rules."""
    if cfg.llm_endpoint:
        return plan_llm(query, cfg, transport=transport)
    return plan_rule_based(query, cfg)


def plan_temporal(
    query: str | list[str],
    cfg: PlannerConfig = PlannerConfig(),
) -> QueryPlan:
    """Split a multi-event query on "->" (or accept a pre-split event list)
    and emit a plan with `events` populated; each event is planned
    independently for its visual sub-query at execution time."""
    if isinstance(query, str):
        if not query.strip():
            raise EmptyQuery("temporal query is empty")
        parts = [p.strip() for p in query.split(EVENT_DELIMITER)]
        original = query
    else:
        parts = [p.strip() for p in query]
        original = f" {EVENT_DELIMITER} ".join(parts)
        if not parts:
            raise EmptyQuery("event list is empty")
    if any(not tokenize(p) for p in parts):
        raise EmptyEvent(f"empty event in {original!r}")

    events = tuple(parts)
    expansions = (original,) + tuple(expansion_variants(original, cfg.n_expansions - 1))
    return QueryPlan(
        original=original,
        expansions=expansions,
        sub_queries={VIS: original},
        weights=FusionWeights(w_vis=cfg.vis_solo_weight, rationale="temporal query"),
        events=events,
        rationale=f"temporal query with {len(events)} event(s)",
        source=SOURCE_RULE_BASED,
    )
