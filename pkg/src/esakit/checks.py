"""Perturbed quality-control items: generation, injection, and evaluation.

A check item is a copy of a real segment whose target text gets a token
window replaced by an incongruent phrase. The copied QE pre-fill is offset-
adjusted and deliberately never covers the perturbed region, so a diligent
annotator must flag the perturbation on their own.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .model import Annotation, CheckInfo, SegmentTask, SpanOrigin
from .spandiff import ACCEPTED_KINDS, diff_segment

#: Replacement phrases; clearly incongruent in any target text. Overridable
#: via a plain text file, one phrase per line.
DEFAULT_PHRASES = (
    "squirrels are never",
    "the teapot votes on thursdays",
    "gravel dreams of warm soup",
    "seven umbrellas taught him chess",
    "the carpet negotiated a treaty",
    "bees file quarterly reports",
    "a lighthouse apologized twice",
    "spoons migrate south in winter",
)

_TRAILING_PUNCT = ".,!?;:»«\"')"

_MAX_DRAWS = 64


def load_phrases(path: str | Path) -> tuple[str, ...]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    phrases = tuple(line.strip() for line in lines if line.strip())
    if not phrases:
        raise ValueError(f"phrase file {path} is empty")
    return phrases


@dataclass(frozen=True)
class Perturbation:
    base_segment_id: str
    region: tuple[int, int]
    replacement_text: str
    perturbed_target: str


def apply_perturbation(target: str, region: tuple[int, int], phrase: str) -> str:
    start, end = region
    if not (0 <= start < end <= len(target)):
        raise ValueError("region is not a valid interval in the target")
    if target[start:end] == phrase:
        raise ValueError("replacement must differ from the replaced substring")
    return target[:start] + phrase + target[end:]


def _token_intervals(text: str) -> list[tuple[int, int]]:
    return [(m.start(), m.end()) for m in re.finditer(r"\S+", text)]


def _strip_trailing_punct(text: str, start: int, end: int) -> int:
    while end > start + 1 and text[end - 1] in _TRAILING_PUNCT:
        end -= 1
    return end


def generate_perturbation(
    task: SegmentTask,
    rng_seed: int,
    phrases: Sequence[str] = DEFAULT_PHRASES,
) -> Perturbation:
    """Replace a seeded token window (20-50% of the target) with a phrase.

    Windows that intersect a pre-fill span are redrawn, keeping the invariant
    that the copied pre-fill never covers the perturbed region. Trailing
    punctuation of the window's last token stays in place.
    """
    tokens = _token_intervals(task.target_text)
    n = len(tokens)
    if n < 4:
        raise ValueError(f"unperturbable: target of {task.segment_id} has {n} tokens")
    rng = random.Random(rng_seed)
    w_min = max(1, -(-n // 5))  # ceil(0.2 n)
    w_max = max(w_min, n // 2)
    for _ in range(_MAX_DRAWS):
        width = rng.randint(w_min, w_max)
        first = rng.randrange(0, n - width + 1)
        start = tokens[first][0]
        end = _strip_trailing_punct(task.target_text, start, tokens[first + width - 1][1])
        if any(span.start < end and start < span.end for span in task.prefill_spans):
            continue
        phrase = rng.choice(phrases)
        if task.target_text[start:end] == phrase:
            continue
        return Perturbation(
            base_segment_id=task.segment_id,
            region=(start, end),
            replacement_text=phrase,
            perturbed_target=apply_perturbation(task.target_text, (start, end), phrase),
        )
    raise ValueError(f"unperturbable: no region clear of pre-fill in {task.segment_id}")


def make_check_task(task: SegmentTask, perturbation: Perturbation) -> SegmentTask:
    """Build the perturbed sibling task: own document, shifted pre-fill."""
    start, end = perturbation.region
    delta = len(perturbation.replacement_text) - (end - start)
    shifted = []
    for span in task.prefill_spans:
        if span.end <= start:
            shifted.append(span)
        elif span.start >= end:
            shifted.append(replace(span, start=span.start + delta, end=span.end + delta))
        else:
            raise ValueError("pre-fill span intersects the perturbed region")
    return replace(
        task,
        segment_id=task.segment_id + "::check",
        item_id=task.item_id + "::check",
        document_id=f"check::{task.segment_id}",
        target_text=perturbation.perturbed_target,
        prefill_spans=tuple(shifted),
        check_info=CheckInfo(
            perturbed_region=(start, start + len(perturbation.replacement_text)),
            original_segment_id=task.segment_id,
        ),
    )


def _document_groups(tasks: Sequence[SegmentTask]) -> list[list[SegmentTask]]:
    groups: list[list[SegmentTask]] = []
    for task in tasks:
        if groups and groups[-1][0].document_id == task.document_id:
            groups[-1].append(task)
        else:
            groups.append([task])
    return groups


def inject_checks(
    tasks: Sequence[SegmentTask],
    rate: float = 12.0,
    rng_seed: int = 0,
    phrases: Sequence[str] = DEFAULT_PHRASES,
) -> list[SegmentTask]:
    """Duplicate round(rate·n/100) tasks as perturbed checks, seeded.

    Each check becomes its own single-segment document inserted at a seeded
    document boundary, so the annotator meets original and perturbed variant
    in distinct documents of the same batch. Originals are never removed.
    """
    if not 0 < rate < 100:
        raise ValueError("check rate must be in (0, 100)")
    count = int(rate * len(tasks) / 100 + 0.5)
    rng = random.Random(rng_seed)

    candidates = list(tasks)
    rng.shuffle(candidates)
    check_tasks = []
    for task in candidates:
        if len(check_tasks) == count:
            break
        if task.is_check:
            continue
        try:
            perturbation = generate_perturbation(task, rng.randrange(2**32), phrases)
        except ValueError:
            continue
        check_tasks.append(make_check_task(task, perturbation))
    if len(check_tasks) < count:
        raise ValueError(f"only {len(check_tasks)} of {count} tasks are perturbable")

    groups = _document_groups(tasks)
    for check in check_tasks:
        groups.insert(rng.randrange(0, len(groups) + 1), [check])
    return [task for group in groups for task in group]


@dataclass(frozen=True)
class CheckOutcome:
    """Pass signals for one original/perturbed pair by the same annotator."""

    score_ok: bool
    span_count_ok: bool
    perturbation_marked: bool


def evaluate_check(
    original: Annotation, perturbed: Annotation, region: tuple[int, int]
) -> CheckOutcome:
    """Did the annotator score the original higher, mark more spans on the
    perturbed item, and mark the perturbed region itself?"""
    if original.annotator_id != perturbed.annotator_id:
        raise ValueError("paired check items must be annotated by the same annotator")
    start, end = region
    marked = any(
        span.origin is SpanOrigin.HUMAN and min(span.end, end) - max(span.start, start) >= 1
        for span in perturbed.spans
    )
    return CheckOutcome(
        score_ok=original.direct_score > perturbed.direct_score,
        span_count_ok=len(original.spans) < len(perturbed.spans),
        perturbation_marked=marked,
    )


@dataclass(frozen=True)
class TrustEffect:
    accept_before: Optional[float]
    accept_after: Optional[float]
    n_before: int
    n_after: int


def trust_effect(
    streams: Mapping[str, Sequence[tuple[SegmentTask, Annotation]]]
) -> TrustEffect:
    """AI-span acceptance in the documents adjacent to each check.

    ``streams`` maps each annotator to their (task, annotation) pairs in
    work order. Acceptance in a document is the fraction of AI pre-fill
    spans that survived (kept, severity-changed, moved, or resized).
    Documents without AI spans, and checks at a stream edge, contribute
    only what exists.
    """
    before_rates, after_rates = [], []
    for entries in streams.values():
        docs = _document_groups([task for task, _ in entries])
        annotations = {a.segment_id: a for _, a in entries}
        for idx, doc in enumerate(docs):
            if not any(task.is_check for task in doc):
                continue
            for neighbor, rates in ((idx - 1, before_rates), (idx + 1, after_rates)):
                if not 0 <= neighbor < len(docs):
                    continue
                rate = _acceptance_rate(docs[neighbor], annotations)
                if rate is not None:
                    rates.append(rate)
    return TrustEffect(
        accept_before=sum(before_rates) / len(before_rates) if before_rates else None,
        accept_after=sum(after_rates) / len(after_rates) if after_rates else None,
        n_before=len(before_rates),
        n_after=len(after_rates),
    )


def _acceptance_rate(doc: Sequence[SegmentTask], annotations) -> Optional[float]:
    if any(task.is_check for task in doc):
        return None
    total = accepted = 0
    for task in doc:
        annotation = annotations.get(task.segment_id)
        if annotation is None or not task.prefill_spans:
            continue
        records = diff_segment(task.prefill_spans, annotation.spans, task.segment_id)
        total += len(task.prefill_spans)
        accepted += sum(1 for r in records if r.kind in ACCEPTED_KINDS)
    return accepted / total if total else None
