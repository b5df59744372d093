"""Token normalization shared by the text index, planner, scorers and the
corpus generator.

Rules: Unicode NFC, lowercase, split on any non-alphanumeric codepoint.
No stemming, no stop words — language-neutral and reproducible. Underscore
counts as a separator (it is not alphanumeric).
"""

import re
import unicodedata

# runs of Unicode alphanumerics, underscore excluded
_TOKEN_RE = re.compile(r"[^\W_]+")


def normalize_text(text: str) -> str:
    return unicodedata.normalize("NFC", text).lower()


def tokenize(text: str) -> list[str]:
    """Normalized token list, in document order (may contain duplicates)."""
    return _TOKEN_RE.findall(normalize_text(text))


def token_set(text: str) -> frozenset[str]:
    return frozenset(tokenize(text))
