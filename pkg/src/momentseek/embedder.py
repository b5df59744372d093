"""Deterministic text embedder used as the stand-in for the two dual
encoders.

Each token maps to a fixed Gaussian direction derived from a SHA-256 of
(space, token); a text embeds as the normalized sum of its token vectors
(with multiplicity). Identical text always embeds identically, overlapping
token sets land near each other, and the two spaces are decorrelated by the
hash salt. Real deployments replace this with model-backed providers; the
engine only requires `embed` (unit vector of the space's dimension).
"""

from __future__ import annotations

import hashlib

import numpy as np

from .corpus import Space
from .textnorm import tokenize


def _token_vector(space: Space, token: str, dim: int) -> np.ndarray:
    digest = hashlib.sha256(f"{space.value}:{token}".encode("utf-8")).digest()
    seed = int.from_bytes(digest[:8], "little")
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.standard_normal(dim)


class ReferenceTextEmbedder:
    """Hash-projection bag-of-words embedder, one instance per corpus."""

    def __init__(self, dims: dict[Space, int]):
        self.dims = dict(dims)
        self._cache: dict[tuple[Space, str], np.ndarray] = {}

    def embed(self, text: str, space: Space) -> np.ndarray:
        dim = self.dims[space]
        acc = np.zeros(dim)
        for token in tokenize(text):
            key = (space, token)
            vec = self._cache.get(key)
            if vec is None:
                vec = _token_vector(space, token, dim)
                self._cache[key] = vec
            acc = acc + vec
        norm = np.linalg.norm(acc)
        if norm < 1e-12:
            acc = np.zeros(dim)
            acc[0] = 1.0
            return acc
        return acc / norm
