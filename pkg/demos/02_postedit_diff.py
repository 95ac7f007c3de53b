"""
What did the annotator do to the AI pre-fill?
=============================================

Pre-filled spans and the submitted spans are matched by maximum total
overlap, then each pairing is classified: kept, resized, moved, severity
changed, removed, or added from scratch.
"""

from esakit.model import ErrorSpan, Severity, SpanOrigin
from esakit.spandiff import ACCEPTED_KINDS, diff_segment, summarize_edits

AI, HUMAN = SpanOrigin.AI, SpanOrigin.HUMAN
MINOR, MAJOR = Severity.MINOR, Severity.MAJOR

prefill = (
    ErrorSpan(0, 10, MINOR, AI),     # annotator will keep this one
    ErrorSpan(15, 25, MINOR, AI),    # ... upgrade this one to major
    ErrorSpan(30, 38, MINOR, AI),    # ... stretch this one a little
    ErrorSpan(50, 60, MAJOR, AI),    # ... and delete this one
)
final = (
    ErrorSpan(0, 10, MINOR, AI),
    ErrorSpan(15, 25, MAJOR, AI),
    ErrorSpan(30, 42, MINOR, AI),
    ErrorSpan(85, 94, MAJOR, HUMAN),  # a brand-new human find
)

records = diff_segment(prefill, final, "demo::item1")
for record in records:
    before = record.ai_span and (record.ai_span.start, record.ai_span.end)
    after = record.human_span and (record.human_span.start, record.human_span.end)
    print(f"{record.kind.value:>16}: {before} -> {after}")

edits = summarize_edits(records)
print()
print(f"{edits.n_prefill} pre-filled, {edits.n_kept} kept unchanged,")
print(f"{edits.n_severity_change} severity changes, {edits.n_resize} resized,")
print(f"{edits.n_removed} removed, {edits.n_added} added by the annotator")

# "accepted" pre-fill = anything matched and not deleted
accepted = sum(1 for r in records if r.kind in ACCEPTED_KINDS)
print(f"acceptance: {accepted}/{edits.n_prefill}")
