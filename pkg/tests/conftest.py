"""Shared builders and the released-data gate.

Data-gated tests recompute published campaign statistics; they skip unless
the released campaign exports are present (see README: "Released data")
under ESA_RELEASED_DATA or <repo>/data/released.
"""

from __future__ import annotations

import os
from pathlib import Path

import pytest

from esakit.campaign.build import build_campaign
from esakit.campaign.config import CampaignConfig
from esakit.campaign.records import Export, InputSegment, write_segments_input
from esakit.model import Annotation, ErrorSpan, SegmentTask, Severity, SpanOrigin

REPO_ROOT = Path(__file__).resolve().parent.parent


def span(start, end, severity="minor", origin="human", on_missing=False) -> ErrorSpan:
    return ErrorSpan(start, end, Severity(severity), SpanOrigin(origin), on_missing=on_missing)


def make_task(
    segment_id="sysA::item1",
    item_id="item1",
    document_id="sysA::doc1",
    system_id="sysA",
    source_text="Ein Quellsatz.",
    target_text="A source sentence translated into some words.",
    prefill_spans=(),
    check_info=None,
) -> SegmentTask:
    return SegmentTask(
        segment_id=segment_id,
        item_id=item_id,
        document_id=document_id,
        system_id=system_id,
        source_text=source_text,
        target_text=target_text,
        prefill_spans=tuple(prefill_spans),
        check_info=check_info,
    )


def make_annotation(
    segment_id="sysA::item1",
    annotator_id="ann1",
    spans=(),
    direct_score=80,
    duration_seconds=30.0,
    submitted_at="2025-01-01T00:00:00+00:00",
    sequence_index=1,
) -> Annotation:
    return Annotation(
        segment_id=segment_id,
        annotator_id=annotator_id,
        spans=tuple(spans),
        direct_score=direct_score,
        duration_seconds=duration_seconds,
        submitted_at=submitted_at,
        sequence_index=sequence_index,
    )


def make_export(tasks, annotations, run_id="test-run") -> Export:
    return Export(
        run_id=run_id,
        segments={task.segment_id: task for task in tasks},
        annotations=list(annotations),
    )


def input_rows(systems=("sysA", "sysB"), items=20, doc_size=5) -> list[InputSegment]:
    rows = []
    for system in systems:
        for i in range(items):
            rows.append(
                InputSegment(
                    document_id=f"doc{i // doc_size}",
                    item_id=f"item{i:03d}",
                    system_id=system,
                    source_text=f"Source sentence number {i}.",
                    target_text=f"Target sentence {i} with several more words inside.",
                )
            )
    return rows


def campaign_config(**overrides) -> CampaignConfig:
    base = dict(
        run_id="run1",
        systems=("sysA", "sysB"),
        source_lang="English",
        target_lang="German",
        segments_per_annotator=20,
        check_rate=12.0,
        seed=1,
    )
    base.update(overrides)
    return CampaignConfig(**base)


def build_campaign_dir(root, name="camp", input_kwargs=None, provider=None, **config_kwargs):
    """Write a small input file and build a campaign under root/name."""
    input_path = root / f"{name}.tsv"
    write_segments_input(input_path, input_rows(**(input_kwargs or {})))
    out = root / name
    campaign = build_campaign(
        campaign_config(**config_kwargs), input_path, out, provider=provider
    )
    return out, campaign


class ManualClock:
    """time.time stand-in the test advances by hand."""

    def __init__(self, start=1000.0):
        self.now = float(start)

    def __call__(self) -> float:
        return self.now

    def advance(self, dt: float) -> None:
        self.now += dt


def released_data_dir() -> Path | None:
    env = os.environ.get("ESA_RELEASED_DATA")
    candidates = [Path(env)] if env else []
    candidates.append(REPO_ROOT / "data" / "released")
    for candidate in candidates:
        if candidate.is_dir():
            return candidate
    return None


@pytest.fixture
def released_data():
    path = released_data_dir()
    if path is None:
        pytest.skip("released campaign data not present (see README: Released data)")
    return path
