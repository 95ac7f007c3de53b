"""
Error spans and the two kinds of segment score
==============================================

An annotation is a list of severity-tagged character spans plus one holistic
0-100 judgment. Scores can also be *derived* from the spans alone: -1 per
minor error, -5 per major one.
"""

from esakit.model import (
    Annotation,
    ErrorSpan,
    SegmentTask,
    Severity,
    SpanOrigin,
    display_text,
    missing_token_span,
    score_from_spans,
    summarize_annotations,
)

task = SegmentTask(
    segment_id="demo::item1",
    item_id="item1",
    document_id="demo::doc1",
    system_id="demo",
    source_text="Der Vertrag wurde gestern unterschrieben.",
    target_text="The contract was signed tomorrow.",
)

# "tomorrow" contradicts the source: a major accuracy error
wrong_word = ErrorSpan(25, 33, Severity.MAJOR, SpanOrigin.HUMAN)

# omissions are marked on a synthetic trailing token, visible in display_text
display = display_text(task.target_text)
print("annotators see:", repr(display))
start, end = missing_token_span(display)
omission = ErrorSpan(start, end, Severity.MINOR, SpanOrigin.HUMAN, on_missing=True)

annotation = Annotation(
    segment_id=task.segment_id,
    annotator_id="demo-annotator",
    spans=(wrong_word, omission),
    direct_score=40,
    duration_seconds=31.5,
    submitted_at="2025-06-01T10:00:00+00:00",
    sequence_index=1,
)

print("direct score:", annotation.direct_score)
print("score from spans:", score_from_spans(annotation.spans))  # -5 - 1 = -6

stats = summarize_annotations([annotation])
print(
    f"{stats.n_spans} spans over {stats.n_annotations} annotation(s), "
    f"{stats.minor_pct:.0f}% minor / {stats.major_pct:.0f}% major, "
    f"mean score {stats.mean_score:.1f}"
)
