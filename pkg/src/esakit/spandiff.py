"""Match AI pre-fill spans against final human spans and classify post-edits.

Matching is deterministic: an exact maximum-total-overlap one-to-one
assignment (ties broken by smaller endpoint distance, then by earlier span
order), followed by a proximity fallback that pairs leftover AI spans with
leftover human spans within 20 characters endpoint distance. All functions
are pure and parallelizable per segment.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .model import ErrorSpan

#: Largest Move bucket; also the endpoint-distance limit for the proximity
#: fallback when an AI span overlaps no human span.
PROXIMITY_LIMIT = 20

#: Above this many spans on a side the exact assignment falls back to greedy.
_EXACT_LIMIT = 12


@dataclass(frozen=True)
class SpanMatch:
    """One AI pre-fill span and the human span it was paired with, if any."""

    ai_span: ErrorSpan
    human_span: Optional[ErrorSpan]
    overlap_chars: int
    distance: Optional[int] = None
    by_proximity: bool = False


@dataclass(frozen=True)
class MatchResult:
    matches: tuple[SpanMatch, ...]
    added: tuple[ErrorSpan, ...]


def _span_key(span: ErrorSpan) -> tuple:
    return (span.start, span.end, span.severity.value, span.origin.value, span.on_missing)


def match_spans(prefill: Sequence[ErrorSpan], final: Sequence[ErrorSpan]) -> MatchResult:
    """Pair each AI span with at most one human span.

    Returns one SpanMatch per AI span (``human_span`` is None when removed)
    plus the human spans left unpaired (the additions). The match set depends
    only on the span multisets, not on input ordering.
    """
    ai = sorted(prefill, key=_span_key)
    human = sorted(final, key=_span_key)
    assignment = _assign_by_overlap(ai, human)

    used_human = {j for j in assignment if j is not None}
    free_ai = [i for i, j in enumerate(assignment) if j is None]
    free_human = [j for j in range(len(human)) if j not in used_human]
    for i, j in _proximity_pairs(ai, human, free_ai, free_human):
        assignment[i] = j
        used_human.add(j)

    matches = []
    for i, j in enumerate(assignment):
        if j is None:
            matches.append(SpanMatch(ai[i], None, 0))
        else:
            overlap = ai[i].overlap(human[j])
            matches.append(
                SpanMatch(
                    ai[i],
                    human[j],
                    overlap,
                    distance=ai[i].endpoint_distance(human[j]),
                    by_proximity=overlap == 0,
                )
            )
    added = tuple(human[j] for j in range(len(human)) if j not in used_human)
    return MatchResult(tuple(matches), added)


def _assign_by_overlap(ai: list[ErrorSpan], human: list[ErrorSpan]) -> list[Optional[int]]:
    """Assignment maximizing (total overlap, -total distance), deterministic."""
    if not ai or not human:
        return [None] * len(ai)
    overlap = [[a.overlap(h) for h in human] for a in ai]
    if len(ai) > _EXACT_LIMIT or len(human) > _EXACT_LIMIT:
        return _greedy_assign(ai, human, overlap)

    memo: dict[tuple[int, int], tuple[int, int]] = {}

    def best(i: int, mask: int) -> tuple[int, int]:
        if i == len(ai):
            return (0, 0)
        key = (i, mask)
        if key in memo:
            return memo[key]
        value = best(i + 1, mask)  # leave ai[i] unmatched
        for j in range(len(human)):
            if overlap[i][j] > 0 and not mask & (1 << j):
                o, d = best(i + 1, mask | (1 << j))
                candidate = (o + overlap[i][j], d - ai[i].endpoint_distance(human[j]))
                if candidate > value:
                    value = candidate
        memo[key] = value
        return value

    # Walk choices front-to-back; among optima this resolves ties toward the
    # earliest human span at the earliest AI span (both lists are sorted).
    assignment: list[Optional[int]] = []
    mask = 0
    for i in range(len(ai)):
        target = best(i, mask)
        chosen: Optional[int] = None
        for j in range(len(human)):
            if overlap[i][j] > 0 and not mask & (1 << j):
                o, d = best(i + 1, mask | (1 << j))
                if (o + overlap[i][j], d - ai[i].endpoint_distance(human[j])) == target:
                    chosen = j
                    break
        assignment.append(chosen)
        if chosen is not None:
            mask |= 1 << chosen
    return assignment


def _greedy_assign(ai, human, overlap) -> list[Optional[int]]:
    pairs = sorted(
        (
            (-overlap[i][j], ai[i].endpoint_distance(human[j]), i, j)
            for i in range(len(ai))
            for j in range(len(human))
            if overlap[i][j] > 0
        )
    )
    assignment: list[Optional[int]] = [None] * len(ai)
    used = set()
    for _, _, i, j in pairs:
        if assignment[i] is None and j not in used:
            assignment[i] = j
            used.add(j)
    return assignment


def _proximity_pairs(ai, human, free_ai, free_human) -> list[tuple[int, int]]:
    candidates = sorted(
        (ai[i].endpoint_distance(human[j]), i, j)
        for i in free_ai
        for j in free_human
        if ai[i].endpoint_distance(human[j]) <= PROXIMITY_LIMIT
    )
    chosen = []
    taken_ai, taken_human = set(), set()
    for _, i, j in candidates:
        if i not in taken_ai and j not in taken_human:
            chosen.append((i, j))
            taken_ai.add(i)
            taken_human.add(j)
    return chosen


class EditKind(str, Enum):
    KEPT = "kept"
    REMOVED = "removed"
    ADDED = "added"
    SEVERITY_CHANGE = "severity_change"
    MOVE = "move"
    RESIZE = "resize"


class Direction(str, Enum):
    INCREASE = "increase"
    DECREASE = "decrease"


@dataclass(frozen=True)
class EditRecord:
    """The classified difference for one pre-fill span or one added span."""

    kind: EditKind
    segment_id: str = ""
    ai_span: Optional[ErrorSpan] = None
    human_span: Optional[ErrorSpan] = None
    direction: Optional[Direction] = None
    distance: Optional[int] = None
    delta: Optional[int] = None


def classify_edits(result: MatchResult, segment_id: str = "") -> list[EditRecord]:
    """Emit one EditRecord per pre-fill span plus one per added human span.

    Labels are disjoint, in priority order: severity change (same endpoints),
    kept, move (pure shift), resize (anything else, including shift plus
    length change).
    """
    records = []
    for match in result.matches:
        ai, human = match.ai_span, match.human_span
        if human is None:
            records.append(EditRecord(EditKind.REMOVED, segment_id, ai_span=ai))
            continue
        if ai.interval() == human.interval():
            if ai.severity is human.severity:
                kind, direction = EditKind.KEPT, None
            else:
                kind = EditKind.SEVERITY_CHANGE
                direction = (
                    Direction.INCREASE
                    if human.severity.rank > ai.severity.rank
                    else Direction.DECREASE
                )
            records.append(EditRecord(kind, segment_id, ai_span=ai, human_span=human, direction=direction))
        elif human.start - ai.start == human.end - ai.end:
            records.append(
                EditRecord(
                    EditKind.MOVE,
                    segment_id,
                    ai_span=ai,
                    human_span=human,
                    distance=ai.endpoint_distance(human),
                )
            )
        else:
            delta = human.length - ai.length
            records.append(
                EditRecord(
                    EditKind.RESIZE,
                    segment_id,
                    ai_span=ai,
                    human_span=human,
                    direction=Direction.INCREASE if delta > 0 else Direction.DECREASE,
                    distance=ai.endpoint_distance(human),
                    delta=delta,
                )
            )
    for span in result.added:
        records.append(EditRecord(EditKind.ADDED, segment_id, human_span=span))
    return records


def diff_segment(prefill: Sequence[ErrorSpan], final: Sequence[ErrorSpan], segment_id: str = "") -> list[EditRecord]:
    """match_spans + classify_edits in one call."""
    return classify_edits(match_spans(prefill, final), segment_id)


#: Records whose AI span survived in some form (everything but removed).
ACCEPTED_KINDS = frozenset(
    {EditKind.KEPT, EditKind.SEVERITY_CHANGE, EditKind.MOVE, EditKind.RESIZE}
)


_COUNT_BINS = ("0", "1", "2", "3+")


def _count_bin(n: int) -> str:
    return str(n) if n < 3 else "3+"


def _bucket(qe_count: int) -> str:
    return str(qe_count) if qe_count < 4 else "4+"


@dataclass(frozen=True)
class DistributionRow:
    qe_count: str
    n_segments: int
    freq: float
    removed: Mapping[str, float]
    no_edit: float
    added: Mapping[str, float]


def edit_distribution(
    records: Iterable[EditRecord], prefill_counts: Mapping[str, int]
) -> list[DistributionRow]:
    """Post-edit distribution keyed by the segment's original QE span count.

    ``prefill_counts`` must cover every segment (segments with no edit
    records still count toward their bucket). Percentages within a row are
    fractions of the segments in that bucket.
    """
    per_segment: dict[str, dict[str, int]] = {
        seg: {"removed": 0, "added": 0, "edited": 0} for seg in prefill_counts
    }
    for record in records:
        seg = per_segment.get(record.segment_id)
        if seg is None:
            raise ValueError(f"record for unknown segment {record.segment_id!r}")
        if record.kind is EditKind.REMOVED:
            seg["removed"] += 1
        elif record.kind is EditKind.ADDED:
            seg["added"] += 1
        if record.kind is not EditKind.KEPT:
            seg["edited"] += 1

    total = len(prefill_counts)
    rows = []
    for bucket in ("0", "1", "2", "3", "4+"):
        segs = [s for s, c in prefill_counts.items() if _bucket(c) == bucket]
        if not segs:
            continue
        n = len(segs)
        removed = {b: 0 for b in _COUNT_BINS}
        added = {b: 0 for b in _COUNT_BINS}
        no_edit = 0
        for seg in segs:
            stats = per_segment[seg]
            removed[_count_bin(stats["removed"])] += 1
            added[_count_bin(stats["added"])] += 1
            if stats["edited"] == 0:
                no_edit += 1
        rows.append(
            DistributionRow(
                qe_count=bucket,
                n_segments=n,
                freq=n / total,
                removed={b: c / n for b, c in removed.items()},
                no_edit=no_edit / n,
                added={b: c / n for b, c in added.items()},
            )
        )
    return rows


@dataclass(frozen=True)
class EditSummary:
    """Post-edit operation frequencies over a set of edit records.

    Severity-change, move, and resize rates are reported against both
    denominators (all pre-fill spans and matched spans only) because the
    natural denominator is ambiguous.
    """

    n_prefill: int
    n_matched: int
    n_added: int
    n_kept: int
    n_removed: int
    n_severity_change: int
    n_severity_increase: int
    n_move: int
    n_resize: int
    n_resize_increase: int
    move_within: Mapping[int, int]

    def pct_of_prefill(self, count: int) -> Optional[float]:
        return 100.0 * count / self.n_prefill if self.n_prefill else None

    def pct_of_matched(self, count: int) -> Optional[float]:
        return 100.0 * count / self.n_matched if self.n_matched else None


def summarize_edits(records: Iterable[EditRecord], move_buckets=(5, 10, 20)) -> EditSummary:
    records = list(records)
    by_kind = {kind: [r for r in records if r.kind is kind] for kind in EditKind}
    moves = by_kind[EditKind.MOVE]
    n_matched = sum(len(by_kind[k]) for k in ACCEPTED_KINDS)
    severity_changes = by_kind[EditKind.SEVERITY_CHANGE]
    resizes = by_kind[EditKind.RESIZE]
    # Cumulative buckets: a move of distance 3 counts toward <=5, <=10, <=20.
    move_within = {
        limit: sum(1 for r in moves if r.distance is not None and r.distance <= limit)
        for limit in move_buckets
    }
    return EditSummary(
        n_prefill=n_matched + len(by_kind[EditKind.REMOVED]),
        n_matched=n_matched,
        n_added=len(by_kind[EditKind.ADDED]),
        n_kept=len(by_kind[EditKind.KEPT]),
        n_removed=len(by_kind[EditKind.REMOVED]),
        n_severity_change=len(severity_changes),
        n_severity_increase=sum(1 for r in severity_changes if r.direction is Direction.INCREASE),
        n_move=len(moves),
        n_resize=len(resizes),
        n_resize_increase=sum(1 for r in resizes if r.direction is Direction.INCREASE),
        move_within=move_within,
    )


@dataclass(frozen=True)
class CurvePoint:
    position: int
    removed: float
    kept: float
    added: float
    n_segments: int


def overreliance_curve(
    observations: Iterable[tuple[int, Sequence[EditRecord]]], window: int = 1
) -> list[CurvePoint]:
    """Removed/kept/added span counts as a function of annotator progress.

    Each observation is (sequence_index, edit records for that segment);
    counts are averaged over all segments at each progress position, then
    smoothed with a trailing moving window over positions. ``kept`` counts
    every AI span that survived, including edited ones.
    """
    if window < 1:
        raise ValueError("window >= 1")
    by_position: dict[int, list[tuple[int, int, int]]] = {}
    for position, records in observations:
        removed = sum(1 for r in records if r.kind is EditKind.REMOVED)
        kept = sum(1 for r in records if r.kind in ACCEPTED_KINDS)
        added = sum(1 for r in records if r.kind is EditKind.ADDED)
        by_position.setdefault(position, []).append((removed, kept, added))

    positions = sorted(by_position)
    raw = []
    for position in positions:
        rows = by_position[position]
        n = len(rows)
        raw.append(tuple(sum(row[k] for row in rows) / n for k in range(3)) + (n,))

    points = []
    for idx, position in enumerate(positions):
        lo = max(0, idx - window + 1)
        span = raw[lo : idx + 1]
        points.append(
            CurvePoint(
                position=position,
                removed=sum(r[0] for r in span) / len(span),
                kept=sum(r[1] for r in span) / len(span),
                added=sum(r[2] for r in span) / len(span),
                n_segments=raw[idx][3],
            )
        )
    return points
