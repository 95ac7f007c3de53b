"""Domain types shared by all modules: spans, tasks, annotations, scoring.

All types are immutable values (frozen dataclasses); every operation here is
a pure function. Character offsets are Unicode scalar-value offsets, the same
convention used by the service, the storage layer, and the web UI.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

MISSING_TOKEN = "[MISSING]"
#: Every translation is displayed with this suffix so omission errors can be
#: marked as ordinary spans on the trailing token.
MISSING_SUFFIX = " " + MISSING_TOKEN


class Severity(str, enum.Enum):
    MINOR = "minor"
    MAJOR = "major"

    @property
    def weight(self) -> int:
        return _SEVERITY_WEIGHTS[self]

    @property
    def rank(self) -> int:
        """Ordering level: MINOR < MAJOR."""
        return 1 if self is Severity.MINOR else 2


_SEVERITY_WEIGHTS = {Severity.MINOR: 1, Severity.MAJOR: 5}


class SpanOrigin(str, enum.Enum):
    AI = "ai"
    HUMAN = "human"


@dataclass(frozen=True)
class ErrorSpan:
    """A character-offset interval [start, end) on a displayed translation."""

    start: int
    end: int
    severity: Severity
    origin: SpanOrigin
    on_missing: bool = False

    @property
    def length(self) -> int:
        return self.end - self.start

    def overlap(self, other: "ErrorSpan") -> int:
        """Number of characters shared with ``other`` (0 if disjoint)."""
        return max(0, min(self.end, other.end) - max(self.start, other.start))

    def endpoint_distance(self, other: "ErrorSpan") -> int:
        return max(abs(self.start - other.start), abs(self.end - other.end))

    def interval(self) -> tuple[int, int]:
        return (self.start, self.end)

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "severity": self.severity.value,
            "origin": self.origin.value,
            "on_missing": self.on_missing,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ErrorSpan":
        return cls(
            start=int(d["start"]),
            end=int(d["end"]),
            severity=Severity(d["severity"]),
            origin=SpanOrigin(d["origin"]),
            on_missing=bool(d.get("on_missing", False)),
        )


def display_text(target_text: str) -> str:
    """The annotator-facing text: translation plus the [MISSING] suffix."""
    return target_text + MISSING_SUFFIX


def missing_region(display: str) -> Optional[tuple[int, int]]:
    """Interval of the [MISSING] suffix in ``display``, or None if absent."""
    if not display.endswith(MISSING_SUFFIX):
        return None
    return (len(display) - len(MISSING_SUFFIX), len(display))


def missing_token_span(display: str) -> tuple[int, int]:
    """Interval of the [MISSING] token itself (without the leading space)."""
    region = missing_region(display)
    if region is None:
        raise ValueError("display text has no [MISSING] suffix")
    return (region[0] + 1, region[1])


def validate_span(span: ErrorSpan, display: str) -> list[str]:
    """Return every violated span invariant; an empty list means valid.

    Violations are data, not faults: the caller decides whether to reject.
    """
    violations = []
    if span.start < 0:
        violations.append("start >= 0")
    if not span.start < span.end:
        violations.append("start < end")
    if not span.end <= len(display):
        violations.append("end <= display length")
    if span.on_missing:
        region = missing_region(display)
        if region is None or not (region[0] <= span.start and span.end <= region[1]):
            violations.append("on_missing span within [MISSING] suffix")
    return violations


@dataclass(frozen=True)
class CheckInfo:
    """Linkage carried by a perturbed attention-check item."""

    perturbed_region: tuple[int, int]
    original_segment_id: str

    def to_dict(self) -> dict:
        return {
            "perturbed_region": list(self.perturbed_region),
            "original_segment_id": self.original_segment_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckInfo":
        region = d["perturbed_region"]
        return cls((int(region[0]), int(region[1])), d["original_segment_id"])


@dataclass(frozen=True)
class SegmentTask:
    """One source/translation pair to annotate.

    ``segment_id`` is unique per task; ``item_id`` is the source-segment key
    shared across systems, which cross-system joins (score matrices,
    prefiltering) rely on.
    """

    segment_id: str
    item_id: str
    document_id: str
    system_id: str
    source_text: str
    target_text: str
    prefill_spans: tuple[ErrorSpan, ...] = ()
    check_info: Optional[CheckInfo] = None
    prefill_error: Optional[str] = None

    @property
    def display_text(self) -> str:
        return display_text(self.target_text)

    @property
    def is_check(self) -> bool:
        return self.check_info is not None

    def validate(self) -> list[str]:
        problems = []
        display = self.display_text
        for span in self.prefill_spans:
            for violation in validate_span(span, display):
                problems.append(f"prefill span {span.interval()}: {violation}")
            if span.origin is not SpanOrigin.AI:
                problems.append(f"prefill span {span.interval()}: origin must be ai")
        if self.check_info is not None:
            start, end = self.check_info.perturbed_region
            if not (0 <= start < end <= len(display)):
                problems.append("perturbed_region is a valid interval in display text")
        return problems

    def to_dict(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "item_id": self.item_id,
            "document_id": self.document_id,
            "system_id": self.system_id,
            "source_text": self.source_text,
            "target_text": self.target_text,
            "prefill_spans": [s.to_dict() for s in self.prefill_spans],
            "check_info": self.check_info.to_dict() if self.check_info else None,
            "prefill_error": self.prefill_error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SegmentTask":
        check = d.get("check_info")
        return cls(
            segment_id=d["segment_id"],
            item_id=d["item_id"],
            document_id=d["document_id"],
            system_id=d["system_id"],
            source_text=d["source_text"],
            target_text=d["target_text"],
            prefill_spans=tuple(ErrorSpan.from_dict(s) for s in d.get("prefill_spans", [])),
            check_info=CheckInfo.from_dict(check) if check else None,
            prefill_error=d.get("prefill_error"),
        )


@dataclass(frozen=True)
class Annotation:
    """An annotator's final state for one segment."""

    segment_id: str
    annotator_id: str
    spans: tuple[ErrorSpan, ...]
    direct_score: float
    duration_seconds: float
    submitted_at: str
    sequence_index: int

    def __post_init__(self):
        # normalize numerics so serialized form does not depend on whether
        # the caller passed 62 or 62.0
        object.__setattr__(self, "direct_score", float(self.direct_score))
        object.__setattr__(self, "duration_seconds", float(self.duration_seconds))

    def to_dict(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "annotator_id": self.annotator_id,
            "spans": [s.to_dict() for s in self.spans],
            "direct_score": self.direct_score,
            "duration_seconds": self.duration_seconds,
            "submitted_at": self.submitted_at,
            "sequence_index": self.sequence_index,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Annotation":
        return cls(
            segment_id=d["segment_id"],
            annotator_id=d["annotator_id"],
            spans=tuple(ErrorSpan.from_dict(s) for s in d.get("spans", [])),
            direct_score=float(d["direct_score"]),
            duration_seconds=float(d["duration_seconds"]),
            submitted_at=d["submitted_at"],
            sequence_index=int(d["sequence_index"]),
        )


def score_from_spans(spans: Iterable[ErrorSpan]) -> int:
    """Span-based segment score: -1 per minor and -5 per major error.

    Overlapping spans each count; the result is an unclamped nonpositive
    integer.
    """
    return -sum(span.severity.weight for span in spans)


@dataclass(frozen=True)
class AnnotationSummary:
    """Aggregate view over a set of annotations (collected-data overview)."""

    mean_spans: float
    minor_pct: Optional[float]
    major_pct: Optional[float]
    mean_score: float
    n_annotations: int
    n_spans: int


def summarize_annotations(annotations: Sequence[Annotation]) -> AnnotationSummary:
    """Mean error spans per segment, pooled minor/major split, mean score.

    The split is undefined (None) when no spans were marked at all.
    """
    if not annotations:
        raise ValueError("no annotations")
    n_spans = sum(len(a.spans) for a in annotations)
    n_minor = sum(1 for a in annotations for s in a.spans if s.severity is Severity.MINOR)
    if n_spans:
        minor_pct = 100.0 * n_minor / n_spans
        major_pct = 100.0 * (n_spans - n_minor) / n_spans
    else:
        minor_pct = major_pct = None
    return AnnotationSummary(
        mean_spans=n_spans / len(annotations),
        minor_pct=minor_pct,
        major_pct=major_pct,
        mean_score=sum(a.direct_score for a in annotations) / len(annotations),
        n_annotations=len(annotations),
        n_spans=n_spans,
    )
