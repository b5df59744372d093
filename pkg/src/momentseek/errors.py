"""Exception types shared across the engine.

Every error carries enough structure for callers (CLI, HTTP service) to map
it onto an exit code or status code without string matching.
"""


class MomentseekError(Exception):
    """Base class for all engine errors."""


# --- corpus / manifest ingestion ---------------------------------------


class MalformedLine(MomentseekError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DanglingReference(MomentseekError):
    def __init__(self, kind: str, ref_id: str, line_no: int | None = None):
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"{kind} references missing id {ref_id!r}{where}")
        self.kind = kind
        self.ref_id = ref_id
        self.line_no = line_no


class DuplicateId(MomentseekError):
    def __init__(self, dup_id: str, line_no: int | None = None):
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"duplicate id {dup_id!r}{where}")
        self.dup_id = dup_id
        self.line_no = line_no


class InvariantViolation(MomentseekError):
    """A record breaks a corpus invariant; names the first offending line."""

    def __init__(self, message: str, line_no: int | None = None):
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"{message}{where}")
        self.line_no = line_no


# --- embedding sidecar files --------------------------------------------


class BadMagic(MomentseekError):
    pass


class TruncatedFile(MomentseekError):
    pass


class NonUnitVector(MomentseekError):
    def __init__(self, vec_id: str, norm: float):
        super().__init__(f"vector {vec_id!r} has norm {norm!r}, expected 1.0")
        self.vec_id = vec_id
        self.norm = norm


class DimensionMismatch(MomentseekError):
    def __init__(self, space: str, expected: int, got: int):
        super().__init__(f"space {space}: expected dim {expected}, got {got}")
        self.space = space
        self.expected = expected
        self.got = got


# --- search -------------------------------------------------------------


class EmptyIndex(MomentseekError):
    pass


class AllEmpty(MomentseekError):
    """Every per-modality score list handed to fusion was empty."""


class NegativeGap(MomentseekError):
    pass


class NoValidSequence(MomentseekError):
    """No video admits a time-ordered assignment of all events."""


class ScorerFailure(MomentseekError):
    def __init__(self, ids: list[str], reason: str = ""):
        super().__init__(f"scorer failed for {len(ids)} item(s): {reason}")
        self.ids = ids
        self.reason = reason


# --- planning -----------------------------------------------------------


class EmptyQuery(MomentseekError):
    pass


class EmptyEvent(MomentseekError):
    pass


class LlmUnavailable(MomentseekError):
    pass


class SchemaViolation(MomentseekError):
    pass


# --- service / CLI ------------------------------------------------------


class NoCorpus(MomentseekError):
    """An operation requiring an ingested corpus ran before ingest."""
