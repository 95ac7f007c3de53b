"""Canonical line-oriented record formats.

Three files make up an export:

* ``segments.jsonl``: schema-header line, then one task object per line
  (includes QE pre-fill and attention-check linkage).
* ``annotations.jsonl``: schema-header line, then one annotation per line.
* ``timing.tsv``: tab-separated header row, then one row per annotation.

All files are UTF-8; offsets are Unicode scalar positions into the display
text. Writers sort records so identical state exports byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from ..model import Annotation, SegmentTask

SEGMENTS_FILE = "segments.jsonl"
ANNOTATIONS_FILE = "annotations.jsonl"
TIMING_FILE = "timing.tsv"

_SEGMENTS_SCHEMA = "esa.segments"
_ANNOTATIONS_SCHEMA = "esa.annotations"
_VERSION = 1

TIMING_COLUMNS = ("annotator_id", "segment_id", "sequence_index", "duration_seconds")


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def _header(schema: str, run_id: str) -> str:
    return _dumps({"schema": schema, "version": _VERSION, "run_id": run_id})


def _parse_header(line: str, schema: str, path: Path) -> dict:
    try:
        head = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}:1: not a schema header: {exc}") from None
    if not isinstance(head, dict) or head.get("schema") != schema:
        raise ValueError(f"{path}:1: expected schema header {schema!r}")
    return head


def _read_header(path: Path, schema: str) -> dict:
    with path.open(encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
    if not first:
        raise ValueError(f"{path}:1: missing schema header")
    return _parse_header(first, schema, path)


def _iter_records(path: Path, schema: str) -> Iterator[tuple[dict, dict]]:
    """Yield (header, record) pairs; malformed lines name their number."""
    with path.open(encoding="utf-8") as fh:
        header = None
        for number, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if number == 1:
                header = _parse_header(line, schema, path)
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{number}: malformed record: {exc}") from None
            yield header, record
        if header is None:
            raise ValueError(f"{path}:1: missing schema header")


@dataclass
class Export:
    """One campaign run's worth of segments and annotations."""

    run_id: str
    segments: dict[str, SegmentTask] = field(default_factory=dict)
    annotations: list[Annotation] = field(default_factory=list)

    def task_for(self, annotation: Annotation) -> SegmentTask:
        try:
            return self.segments[annotation.segment_id]
        except KeyError:
            raise KeyError(f"annotation references unknown segment {annotation.segment_id!r}")

    def real_annotations(self) -> list[Annotation]:
        """Annotations on real segments, attention checks excluded."""
        return [a for a in self.annotations if not self.task_for(a).is_check]

    def write(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)

        tasks = sorted(self.segments.values(), key=lambda t: t.segment_id)
        lines = [_header(_SEGMENTS_SCHEMA, self.run_id)]
        lines += [_dumps(task.to_dict()) for task in tasks]
        (directory / SEGMENTS_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")

        ordered = sorted(
            self.annotations, key=lambda a: (a.annotator_id, a.sequence_index, a.segment_id)
        )
        lines = [_header(_ANNOTATIONS_SCHEMA, self.run_id)]
        lines += [_dumps(a.to_dict()) for a in ordered]
        (directory / ANNOTATIONS_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")

        rows = ["\t".join(TIMING_COLUMNS)]
        rows += [
            f"{a.annotator_id}\t{a.segment_id}\t{a.sequence_index}\t{a.duration_seconds:g}"
            for a in ordered
        ]
        (directory / TIMING_FILE).write_text("\n".join(rows) + "\n", encoding="utf-8")

    @classmethod
    def read(cls, directory: str | Path) -> "Export":
        directory = Path(directory)
        run_id = _read_header(directory / SEGMENTS_FILE, _SEGMENTS_SCHEMA)["run_id"]
        segments: dict[str, SegmentTask] = {}
        for _, record in _iter_records(directory / SEGMENTS_FILE, _SEGMENTS_SCHEMA):
            task = SegmentTask.from_dict(record)
            segments[task.segment_id] = task
        _read_header(directory / ANNOTATIONS_FILE, _ANNOTATIONS_SCHEMA)
        annotations = []
        for _, record in _iter_records(directory / ANNOTATIONS_FILE, _ANNOTATIONS_SCHEMA):
            annotations.append(Annotation.from_dict(record))
        return cls(run_id=run_id, segments=segments, annotations=annotations)


@dataclass(frozen=True)
class InputSegment:
    """One line of the campaign build input."""

    document_id: str
    item_id: str
    system_id: str
    source_text: str
    target_text: str


_INPUT_COLUMNS = 5


def read_segments_input(path: str | Path) -> list[InputSegment]:
    """Parse the tab-separated build input.

    Columns: document_id, item_id, system_id, source_text, target_text.
    A header row naming exactly those columns is permitted and skipped.
    """
    path = Path(path)
    rows: list[InputSegment] = []
    seen: set[tuple[str, str]] = set()
    with path.open(encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if number == 1 and parts[:3] == ["document_id", "item_id", "system_id"]:
                continue
            if len(parts) != _INPUT_COLUMNS:
                raise ValueError(
                    f"{path}:{number}: expected {_INPUT_COLUMNS} tab-separated fields, "
                    f"got {len(parts)}"
                )
            row = InputSegment(*parts)
            if not row.target_text:
                raise ValueError(f"{path}:{number}: empty target text")
            key = (row.system_id, row.item_id)
            if key in seen:
                raise ValueError(f"{path}:{number}: duplicate (system_id, item_id) {key}")
            seen.add(key)
            rows.append(row)
    return rows


def write_segments_input(path: str | Path, rows: Iterable[InputSegment]) -> None:
    lines = ["\t".join(("document_id", "item_id", "system_id", "source_text", "target_text"))]
    for row in rows:
        for name in ("document_id", "item_id", "system_id", "source_text", "target_text"):
            if "\t" in getattr(row, name) or "\n" in getattr(row, name):
                raise ValueError(f"{name} may not contain tabs or newlines")
        lines.append(
            "\t".join(
                (row.document_id, row.item_id, row.system_id, row.source_text, row.target_text)
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
