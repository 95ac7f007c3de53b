"""
Agreement, cross-protocol correlation, and learned speedup
==========================================================

Synthetic annotators with a shared notion of quality plus personal noise;
the analytics recover the structure: decent inter-annotator agreement,
perfect self-agreement, negative time-per-segment slope.
"""

import random

from esakit.analytics import (
    agreement_report,
    cross_protocol_series,
    kendall_tau_c,
    speedup_report,
    time_feature_correlations,
)
from esakit.campaign.records import Export
from esakit.model import Annotation, ErrorSpan, SegmentTask, Severity, SpanOrigin

rng = random.Random(5)

tasks = {
    f"sys::item{i:02d}": SegmentTask(
        segment_id=f"sys::item{i:02d}",
        item_id=f"item{i:02d}",
        document_id=f"sys::doc{i // 4}",
        system_id="sys",
        source_text="Quelle.",
        target_text=f"Candidate translation {i} with room for disagreement.",
    )
    for i in range(12)
}
quality = {sid: rng.uniform(40, 95) for sid in tasks}


def annotate(annotator, noise, run_offset=0):
    out = []
    for index, sid in enumerate(sorted(tasks), start=1):
        score = max(0, min(100, quality[sid] + rng.gauss(0, noise) + run_offset))
        n_major = 1 if score < 60 else 0
        spans = tuple(
            ErrorSpan(4 * k, 4 * k + 3, Severity.MAJOR, SpanOrigin.HUMAN)
            for k in range(n_major)
        )
        out.append(
            Annotation(
                segment_id=sid,
                annotator_id=annotator,
                spans=spans,
                direct_score=round(score),
                duration_seconds=60 - 3 * index + rng.uniform(0, 4),  # getting faster
                submitted_at="2025-06-01T10:00:00+00:00",
                sequence_index=index,
            )
        )
    return out


run_a = Export("run-a", dict(tasks), annotate("ann1", 6) + annotate("ann2", 6))
# ann1 re-does their work in the second run: the intra pairs
run_b = Export("run-b", dict(tasks), annotate("ann1", 6) + annotate("ann3", 6))

report = agreement_report(run_a, run_b, scoring="direct")
print(f"inter-annotator spearman: {report.inter:.3f} over {report.n_inter} pairs")
print(f"intra-annotator spearman: {report.intra:.3f} over {report.n_intra} pairs")
print()

# direct scores vs span-derived scores: different protocols, same segments
series = cross_protocol_series(run_a, run_a, scoring_a="direct", scoring_b="from_spans")
print(f"direct vs from-spans tau_c: {kendall_tau_c(series):.3f} on {len(series)} segments")
print()

speed = speedup_report(run_a, window=5)
print(f"pooled slope: {speed.slope:.2f} s/segment (negative = speeding up)")
for row in speed.annotators:
    print(f"  {row.annotator_id}: slope {row.slope:.2f}, mad {row.mad:.1f}s")
print()

print("what correlates with time spent?")
for row in time_feature_correlations(run_a):
    shown = "undefined" if row.r is None else f"{row.r:+.2f}"
    print(f"  {row.feature:>13}: {shown}")
