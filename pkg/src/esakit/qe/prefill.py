"""Attach AI error spans to a segment: render, complete, parse, locate."""

from __future__ import annotations

import logging
from dataclasses import replace

from ..model import SegmentTask
from .prompts import QeRequest, locate_spans, parse_error_list, render_error_prompt
from .provider import QeProvider

logger = logging.getLogger(__name__)


def prefill_segment(
    task: SegmentTask,
    provider: QeProvider,
    *,
    source_lang: str,
    target_lang: str,
) -> SegmentTask:
    """Return the task with AI pre-fill spans attached.

    Any failure (empty segment, provider error, nothing locatable) degrades
    to an empty pre-fill with the error recorded; pre-fill never blocks
    annotation. Fully deterministic with a deterministic provider.
    """
    if task.prefill_spans:
        raise ValueError(f"task {task.segment_id} already has pre-fill spans")
    request = QeRequest(
        source_lang=source_lang,
        target_lang=target_lang,
        source_seg=task.source_text,
        target_seg=task.target_text,
    )
    try:
        response = provider.complete(render_error_prompt(request))
    except Exception as exc:  # noqa: BLE001 - recorded, never fatal
        logger.warning("pre-fill failed for %s: %s", task.segment_id, exc)
        return replace(task, prefill_spans=(), prefill_error=str(exc))
    spans = locate_spans(parse_error_list(response), task.display_text)
    return replace(task, prefill_spans=tuple(spans))
