"""Annotation service state: append-only event log with replayable state.

Every mutation goes through one path: build the event, append it to the
log, apply it to in-memory state. Replaying the log from scratch therefore
reconstructs the exact live state (the checkpoint/restart property), and a
snapshot is just a serialized prefix of that replay.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

from ..model import Annotation, ErrorSpan, SegmentTask, validate_span
from .build import Campaign, EVENTS_FILE, load_campaign
from .records import Export

SNAPSHOT_FILE = "snapshot.json"


class Done:
    """Sentinel: the annotator's batch is exhausted."""

    def __repr__(self):
        return "Done"


DONE = Done()


class ServiceError(ValueError):
    """Domain rejection; maps to HTTP 4xx, exit code 1 in the CLI."""


@dataclass
class _AnnotatorState:
    batch_id: str
    claimed: dict  # segment_id -> claim timestamp
    annotations: dict  # segment_id -> Annotation


class CampaignService:
    """Claim/submit workflow over a built campaign directory."""

    def __init__(self, directory: str | Path, clock: Callable[[], float] = time.time):
        self.directory = Path(directory)
        self.clock = clock
        self.campaign: Campaign = load_campaign(self.directory)
        self._lock = threading.Lock()
        self._events_path = self.directory / EVENTS_FILE
        self._annotators: dict[str, _AnnotatorState] = {}
        self._assigned_batches: set[str] = set()
        self._event_count = 0
        self._replay_existing()

    # -- event plumbing ------------------------------------------------

    def _replay_existing(self) -> None:
        start = 0
        snapshot_path = self.directory / SNAPSHOT_FILE
        if snapshot_path.exists():
            snapshot = json.loads(snapshot_path.read_text(encoding="utf-8"))
            if snapshot.get("run_id") == self.campaign.config.run_id:
                self._restore_snapshot(snapshot)
                start = snapshot["event_count"]
        if not self._events_path.exists():
            self._events_path.touch()
            return
        with self._events_path.open(encoding="utf-8") as fh:
            for number, line in enumerate(fh):
                line = line.strip()
                if not line:
                    continue
                if number < start:
                    continue
                self._apply(json.loads(line))

    def _record(self, event: dict) -> None:
        with self._events_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")
            fh.flush()
        self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "annotator_registered":
            self._annotators[event["annotator_id"]] = _AnnotatorState(
                batch_id=event["batch_id"], claimed={}, annotations={}
            )
            self._assigned_batches.add(event["batch_id"])
        elif kind == "task_claimed":
            state = self._annotators[event["annotator_id"]]
            state.claimed.setdefault(event["segment_id"], event["at"])
        elif kind in ("annotation_submitted", "annotation_revised"):
            annotation = Annotation.from_dict(event["annotation"])
            state = self._annotators[annotation.annotator_id]
            state.annotations[annotation.segment_id] = annotation
        else:
            raise ValueError(f"unknown event type {kind!r}")
        self._event_count += 1

    # -- snapshotting ----------------------------------------------------

    def write_snapshot(self) -> Path:
        with self._lock:
            snapshot = {
                "run_id": self.campaign.config.run_id,
                "event_count": self._event_count,
                "annotators": {
                    annotator_id: {
                        "batch_id": state.batch_id,
                        "claimed": state.claimed,
                        "annotations": {
                            segment_id: annotation.to_dict()
                            for segment_id, annotation in state.annotations.items()
                        },
                    }
                    for annotator_id, state in self._annotators.items()
                },
            }
            path = self.directory / SNAPSHOT_FILE
            tmp = path.with_suffix(".tmp")
            tmp.write_text(
                json.dumps(snapshot, ensure_ascii=False, sort_keys=True), encoding="utf-8"
            )
            tmp.replace(path)
            return path

    def _restore_snapshot(self, snapshot: dict) -> None:
        for annotator_id, state in snapshot["annotators"].items():
            self._annotators[annotator_id] = _AnnotatorState(
                batch_id=state["batch_id"],
                claimed=dict(state["claimed"]),
                annotations={
                    segment_id: Annotation.from_dict(data)
                    for segment_id, data in state["annotations"].items()
                },
            )
            self._assigned_batches.add(state["batch_id"])
        self._event_count = snapshot["event_count"]

    # -- operations ------------------------------------------------------

    def register(self, annotator_id: str) -> str:
        """Assign the next free batch; idempotent for known annotators."""
        if not annotator_id:
            raise ServiceError("annotator_id must be nonempty")
        with self._lock:
            state = self._annotators.get(annotator_id)
            if state is not None:
                return state.batch_id
            for batch in self.campaign.batches:
                if batch.batch_id not in self._assigned_batches:
                    self._record(
                        {
                            "event": "annotator_registered",
                            "at": self.clock(),
                            "annotator_id": annotator_id,
                            "batch_id": batch.batch_id,
                        }
                    )
                    return batch.batch_id
            raise ServiceError("no unassigned batches left in this campaign")

    def _state_of(self, annotator_id: str) -> _AnnotatorState:
        state = self._annotators.get(annotator_id)
        if state is None:
            raise ServiceError(f"annotator {annotator_id!r} is not registered")
        return state

    def _batch_of(self, state: _AnnotatorState):
        for batch in self.campaign.batches:
            if batch.batch_id == state.batch_id:
                return batch
        raise ServiceError(f"batch {state.batch_id!r} missing from campaign")

    def claim_next(self, annotator_id: str):
        """Next unannotated task in batch order, or the Done sentinel.

        Claiming is idempotent: repeated claims return the same task and
        keep the first claim's timestamp, so the served duration baseline
        never moves.
        """
        with self._lock:
            state = self._state_of(annotator_id)
            batch = self._batch_of(state)
            for segment_id in batch.segment_ids:
                if segment_id in state.annotations:
                    continue
                if segment_id not in state.claimed:
                    self._record(
                        {
                            "event": "task_claimed",
                            "at": self.clock(),
                            "annotator_id": annotator_id,
                            "segment_id": segment_id,
                        }
                    )
                return self.campaign.tasks[segment_id]
            return DONE

    def document_context(self, segment_id: str, annotator_id: str) -> list[SegmentTask]:
        """All batch tasks sharing the segment's document, in batch order."""
        state = self._state_of(annotator_id)
        batch = self._batch_of(state)
        target = self.campaign.tasks[segment_id]
        return [
            self.campaign.tasks[sid]
            for sid in batch.segment_ids
            if self.campaign.tasks[sid].document_id == target.document_id
        ]

    def submit(
        self,
        annotator_id: str,
        segment_id: str,
        spans: tuple[ErrorSpan, ...],
        direct_score: int,
        client_elapsed: Optional[float] = None,
    ) -> Annotation:
        """Persist an annotation; resubmission revises, latest wins."""
        with self._lock:
            state = self._state_of(annotator_id)
            batch = self._batch_of(state)
            if segment_id not in batch.segment_ids:
                raise ServiceError(f"unknown segment {segment_id!r} for this annotator")
            if segment_id not in state.claimed:
                raise ServiceError(f"segment {segment_id!r} was never claimed")
            task = self.campaign.tasks[segment_id]

            violations = []
            for span in spans:
                violations += [
                    f"span ({span.start},{span.end}): {v}"
                    for v in validate_span(span, task.display_text)
                ]
            if not isinstance(direct_score, (int, float)) or not 0 <= direct_score <= 100:
                violations.append("direct_score must be in [0, 100]")
            if client_elapsed is not None and client_elapsed < 0:
                violations.append("client_elapsed must be nonnegative")
            if violations:
                raise ServiceError("; ".join(violations))

            now = self.clock()
            duration = client_elapsed if client_elapsed is not None else now - state.claimed[segment_id]
            previous = state.annotations.get(segment_id)
            annotation = Annotation(
                segment_id=segment_id,
                annotator_id=annotator_id,
                spans=tuple(spans),
                direct_score=direct_score,
                duration_seconds=max(0.0, float(duration)),
                submitted_at=datetime.fromtimestamp(now, tz=timezone.utc).isoformat(),
                sequence_index=(
                    previous.sequence_index if previous else len(state.annotations) + 1
                ),
            )
            self._record(
                {
                    "event": "annotation_revised" if previous else "annotation_submitted",
                    "at": now,
                    "annotation": annotation.to_dict(),
                }
            )
            return annotation

    def progress(self) -> dict:
        with self._lock:
            total_tasks = sum(len(b.segment_ids) for b in self.campaign.batches)
            done = sum(len(s.annotations) for s in self._annotators.values())
            return {
                "run_id": self.campaign.config.run_id,
                "batches": len(self.campaign.batches),
                "tasks": total_tasks,
                "annotated": done,
                "annotators": {
                    annotator_id: {
                        "batch_id": state.batch_id,
                        "done": len(state.annotations),
                        "total": len(self._batch_of(state).segment_ids),
                    }
                    for annotator_id, state in sorted(self._annotators.items())
                },
            }

    def export(self) -> Export:
        with self._lock:
            annotations = [
                annotation
                for state in self._annotators.values()
                for annotation in state.annotations.values()
            ]
            return Export(
                run_id=self.campaign.config.run_id,
                segments=dict(self.campaign.tasks),
                annotations=annotations,
            )
