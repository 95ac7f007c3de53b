"""
Attention checks: perturbed duplicates with an honest pre-fill
==============================================================

A fraction of tasks is duplicated with a nonsense phrase spliced over a
token window. The copy keeps the original's pre-fill (shifted around the
splice, never covering it), so a diligent annotator must notice the damage
themselves: lower score, extra spans, a mark on the damaged region.
"""

from esakit.checks import evaluate_check, generate_perturbation, inject_checks
from esakit.model import Annotation, ErrorSpan, SegmentTask, Severity, SpanOrigin

tasks = [
    SegmentTask(
        segment_id=f"demo::item{i}",
        item_id=f"item{i}",
        document_id=f"demo::doc{i // 4}",
        system_id="demo",
        source_text="Quelle.",
        target_text=f"Sentence number {i} talks about the weather on the coast.",
    )
    for i in range(25)
]

# rate is per 100 segments, so 25 tasks at 12% -> 3 checks
with_checks = inject_checks(tasks, rate=12.0, rng_seed=7)
checks = [t for t in with_checks if t.check_info is not None]
print(f"{len(tasks)} tasks -> {len(with_checks)} with {len(checks)} checks\n")

check = checks[0]
start, end = check.check_info.perturbed_region
print("paired with:", check.check_info.original_segment_id)
print("perturbed  :", check.target_text)
print("region     :", repr(check.target_text[start:end]))
print()

# what the perturbation generator does under the hood
perturbation = generate_perturbation(tasks[3], rng_seed=1)
print("another draw:", repr(perturbation.replacement_text))
print()

# a diligent annotator vs a careless one
original_annotation = Annotation(
    segment_id=check.check_info.original_segment_id,
    annotator_id="ann1",
    spans=(),
    direct_score=85,
    duration_seconds=20,
    submitted_at="2025-06-01T10:00:00+00:00",
    sequence_index=1,
)


def annotate_check(score, mark_region):
    spans = (ErrorSpan(start, end, Severity.MAJOR, SpanOrigin.HUMAN),) if mark_region else ()
    return Annotation(
        segment_id=check.segment_id,
        annotator_id="ann1",
        spans=spans,
        direct_score=score,
        duration_seconds=18,
        submitted_at="2025-06-01T10:05:00+00:00",
        sequence_index=2,
    )


diligent = evaluate_check(original_annotation, annotate_check(20, True), (start, end))
careless = evaluate_check(original_annotation, annotate_check(85, False), (start, end))
print("diligent:", diligent)
print("careless:", careless)
