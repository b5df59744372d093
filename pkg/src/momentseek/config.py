"""Engine configuration: one dataclass per subsystem, aggregated into
EngineConfig, loadable from a JSON file.

Precedence is CLI flag > config file > built-in default. The environment
variable MOMENTSEEK_CONFIG points at the config file; the effective config
is echoed by GET /v1/health.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .fusion import NormalizationConfig
from .planner import PlannerConfig
from .rerank import CascadeConfig
from .temporal import TemporalConfig
from .vector_index import SrrfConfig

CONFIG_ENV_VAR = "MOMENTSEEK_CONFIG"


@dataclass(frozen=True)
class SearchStageConfig:
    top_k_per_space: int = 100
    first_stage_keep: int = 100  # candidate pool entering the rerank cascade

    def __post_init__(self):
        if self.first_stage_keep > self.top_k_per_space * 2:
            raise ValueError("first_stage_keep must be <= top_k_per_space * 2")


@dataclass(frozen=True)
class ScorerConfig:
    endpoint: str | None = None  # remote cross-scorer; None -> reference scorer
    timeout_s: float = 10.0


@dataclass(frozen=True)
class EngineConfig:
    srrf: SrrfConfig = field(default_factory=SrrfConfig)
    normalization: NormalizationConfig = field(default_factory=NormalizationConfig)
    cascade: CascadeConfig = field(default_factory=CascadeConfig)
    temporal: TemporalConfig = field(default_factory=TemporalConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    search: SearchStageConfig = field(default_factory=SearchStageConfig)
    scorer: ScorerConfig = field(default_factory=ScorerConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_SECTIONS = {
    "srrf": SrrfConfig,
    "normalization": NormalizationConfig,
    "cascade": CascadeConfig,
    "temporal": TemporalConfig,
    "planner": PlannerConfig,
    "search": SearchStageConfig,
    "scorer": ScorerConfig,
}


def config_from_dict(data: dict) -> EngineConfig:
    unknown = data.keys() - _SECTIONS.keys()
    if unknown:
        raise ValueError(f"unknown config section(s): {sorted(unknown)}")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        section = data.get(name)
        if section is None:
            continue
        valid = {f.name for f in dataclasses.fields(cls)}
        bad = section.keys() - valid
        if bad:
            raise ValueError(f"unknown key(s) in config section {name!r}: {sorted(bad)}")
        kwargs[name] = cls(**section)
    return EngineConfig(**kwargs)


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Read the JSON config file (explicit path, else $MOMENTSEEK_CONFIG,
    else all defaults)."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        return EngineConfig()
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return config_from_dict(data)
