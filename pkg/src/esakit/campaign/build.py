"""Campaign construction: pre-fill, batching, shuffling, check injection.

A campaign directory holds:

* ``campaign.json``: config echo plus the per-batch task order.
* ``segments.jsonl``: every task (checks included) in the canonical schema.
* ``events.jsonl``: the service's append-only log (created empty).

Rebuilding with the same inputs and seed is byte-identical, provided QE
responses come from the cache or the mock.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from ..checks import inject_checks
from ..model import SegmentTask
from ..qe import CachingProvider, HttpProvider, MockProvider, QeProvider, prefill_segment
from .config import CampaignConfig
from .records import InputSegment, read_segments_input, _dumps, _header, _SEGMENTS_SCHEMA

CAMPAIGN_FILE = "campaign.json"
SEGMENTS_FILE = "segments.jsonl"
EVENTS_FILE = "events.jsonl"


@dataclass(frozen=True)
class Batch:
    batch_id: str
    segment_ids: tuple[str, ...]


@dataclass
class Campaign:
    config: CampaignConfig
    tasks: dict[str, SegmentTask]
    batches: tuple[Batch, ...]

    def batch_tasks(self, batch: Batch) -> list[SegmentTask]:
        return [self.tasks[sid] for sid in batch.segment_ids]


def make_provider(config: CampaignConfig, base_dir: Path) -> Optional[QeProvider]:
    if config.qe_provider == "none":
        return None
    if config.qe_provider == "mock":
        provider: QeProvider = MockProvider(base_dir / config.qe_responses_dir)
    else:
        provider = HttpProvider(config.qe_url, token_env=config.qe_token_env)
    if config.qe_cache_dir:
        provider = CachingProvider(provider, base_dir / config.qe_cache_dir)
    return provider


def _tasks_from_input(rows: Sequence[InputSegment], config: CampaignConfig) -> list[SegmentTask]:
    wanted = set(config.systems)
    present = {row.system_id for row in rows}
    missing = wanted - present
    if missing:
        raise ValueError(f"input has no rows for systems: {', '.join(sorted(missing))}")
    tasks = []
    for row in rows:
        if row.system_id not in wanted:
            continue
        tasks.append(
            SegmentTask(
                segment_id=f"{row.system_id}::{row.item_id}",
                item_id=row.item_id,
                document_id=f"{row.system_id}::{row.document_id}",
                system_id=row.system_id,
                source_text=row.source_text,
                target_text=row.target_text,
            )
        )
    return tasks


def _partition_documents(tasks: Sequence[SegmentTask], batch_size: int) -> list[list[SegmentTask]]:
    """Split into batches of whole documents, up to batch_size segments each.

    A document larger than the batch size becomes its own oversized batch
    rather than being split across annotators.
    """
    documents: list[list[SegmentTask]] = []
    for task in tasks:
        if documents and documents[-1][0].document_id == task.document_id:
            documents[-1].append(task)
        else:
            documents.append([task])
    batches: list[list[SegmentTask]] = []
    current: list[SegmentTask] = []
    for document in documents:
        if current and len(current) + len(document) > batch_size:
            batches.append(current)
            current = []
        current.extend(document)
    if current:
        batches.append(current)
    return batches


def build_campaign(
    config: CampaignConfig,
    input_path: str | Path,
    out_dir: str | Path,
    provider: Optional[QeProvider] = None,
) -> Campaign:
    """Pre-fill, batch, shuffle, and inject checks; write the campaign dir."""
    rows = read_segments_input(input_path)
    tasks = _tasks_from_input(rows, config)
    if not tasks:
        raise ValueError(f"{input_path}: no usable segments")

    if provider is None:
        provider = make_provider(config, Path(out_dir))
    if provider is not None:
        tasks = [
            prefill_segment(
                task,
                provider,
                source_lang=config.source_lang,
                target_lang=config.target_lang,
            )
            for task in tasks
        ]

    batches = []
    all_tasks: dict[str, SegmentTask] = {}
    for index, batch_tasks in enumerate(_partition_documents(tasks, config.segments_per_annotator)):
        rng = random.Random(f"{config.seed}:batch:{index}")
        documents: list[list[SegmentTask]] = []
        for task in batch_tasks:
            if documents and documents[-1][0].document_id == task.document_id:
                documents[-1].append(task)
            else:
                documents.append([task])
        rng.shuffle(documents)
        ordered = [task for document in documents for task in document]
        if config.check_rate:
            ordered = inject_checks(
                ordered, rate=config.check_rate, rng_seed=rng.randrange(2**32)
            )
        for task in ordered:
            all_tasks[task.segment_id] = task
        batches.append(
            Batch(
                batch_id=f"batch{index:03d}",
                segment_ids=tuple(task.segment_id for task in ordered),
            )
        )

    campaign = Campaign(config=config, tasks=all_tasks, batches=tuple(batches))
    write_campaign(campaign, out_dir)
    return campaign


def write_campaign(campaign: Campaign, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config": campaign.config.to_dict(),
        "batches": [
            {"batch_id": b.batch_id, "segment_ids": list(b.segment_ids)}
            for b in campaign.batches
        ],
    }
    (out_dir / CAMPAIGN_FILE).write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    lines = [_header(_SEGMENTS_SCHEMA, campaign.config.run_id)]
    for segment_id in sorted(campaign.tasks):
        lines.append(_dumps(campaign.tasks[segment_id].to_dict()))
    (out_dir / SEGMENTS_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")
    events = out_dir / EVENTS_FILE
    if not events.exists():
        events.touch()


def load_campaign(directory: str | Path) -> Campaign:
    directory = Path(directory)
    manifest = json.loads((directory / CAMPAIGN_FILE).read_text(encoding="utf-8"))
    config = CampaignConfig.from_dict(manifest["config"])
    tasks: dict[str, SegmentTask] = {}
    with (directory / SEGMENTS_FILE).open(encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or number == 1:
                continue
            task = SegmentTask.from_dict(json.loads(line))
            tasks[task.segment_id] = task
    batches = tuple(
        Batch(batch_id=b["batch_id"], segment_ids=tuple(b["segment_ids"]))
        for b in manifest["batches"]
    )
    return Campaign(config=config, tasks=tasks, batches=batches)
