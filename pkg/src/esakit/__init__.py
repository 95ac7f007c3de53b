"""Error-span annotation with AI assistance: campaigns and analytics.

A quality-estimation system pre-fills error spans on machine translation
output; human annotators post-edit the spans and score each segment 0-100.
This package provides the campaign service that collects such annotations
(with attention checks and an append-only event log) and the analysis
suite that evaluates the results: span-edit diffing, agreement and timing
statistics, system ranking, and ranking-consistency simulations.
"""

from .model import (
    Annotation,
    AnnotationSummary,
    CheckInfo,
    ErrorSpan,
    MISSING_TOKEN,
    SegmentTask,
    Severity,
    SpanOrigin,
    display_text,
    score_from_spans,
    summarize_annotations,
    validate_span,
)

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "AnnotationSummary",
    "CheckInfo",
    "ErrorSpan",
    "MISSING_TOKEN",
    "SegmentTask",
    "Severity",
    "SpanOrigin",
    "display_text",
    "score_from_spans",
    "summarize_annotations",
    "validate_span",
    "__version__",
]
