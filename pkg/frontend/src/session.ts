/**
 * Per-annotator session state: the current document, span edits, the score
 * slider, and the active-time accumulator that feeds client_elapsed.
 */

import {
    ErrorSpan,
    createSpan,
    cycleSeverity,
    displayText,
    toWireSpans,
    validateSpan,
} from "./model.js";

export interface ScoreAnchor {
    value: number;
    label: string;
}

/** Slider anchor labels shown under 0 / 33 / 66 / 100. */
export const SCORE_ANCHORS: readonly ScoreAnchor[] = [
    { value: 0, label: "No meaning preserved" },
    { value: 33, label: "Some meaning preserved" },
    { value: 66, label: "Most meaning preserved and few grammar mistakes" },
    { value: 100, label: "Perfect meaning and grammar" },
];

/**
 * Accumulates wall-clock time only while the window has focus.
 *
 * `elapsedSeconds` is monotonic: a clock that jumps backwards freezes the
 * reading instead of shrinking it.
 */
export class ActiveTimer {
    private accumulatedMs = 0;
    private peakMs = 0;
    private runningSince: number | null;

    constructor(private readonly now: () => number = () => Date.now()) {
        this.runningSince = this.now();
    }

    focus(): void {
        if (this.runningSince === null) {
            this.runningSince = this.now();
        }
    }

    blur(): void {
        if (this.runningSince !== null) {
            this.accumulatedMs += Math.max(0, this.now() - this.runningSince);
            this.runningSince = null;
        }
    }

    elapsedSeconds(): number {
        let ms = this.accumulatedMs;
        if (this.runningSince !== null) {
            ms += Math.max(0, this.now() - this.runningSince);
        }
        // high-water mark: a clock stepping backwards must not shrink the reading
        this.peakMs = Math.max(this.peakMs, ms);
        return this.peakMs / 1000;
    }

    /** Start over for the next segment; keeps running/paused state. */
    reset(): void {
        this.accumulatedMs = 0;
        this.peakMs = 0;
        if (this.runningSince !== null) {
            this.runningSince = this.now();
        }
    }
}

export interface TaskView {
    segment_id: string;
    item_id: string;
    document_id: string;
    system_id: string;
    source_text: string;
    target_text: string;
    prefill_spans: ErrorSpan[];
    prefill_error: string | null;
}

export interface SegmentEdit {
    task: TaskView;
    display: string;
    spans: readonly ErrorSpan[];
    /** null until the annotator explicitly moves the slider. */
    score: number | null;
    submitted: boolean;
}

export interface SubmitBody {
    annotator_id: string;
    segment_id: string;
    spans: ErrorSpan[];
    direct_score: number;
    client_elapsed: number;
}

/**
 * One claimed document at a time.  Every segment stays editable until the
 * whole document is behind us (resubmitting an edited segment files a
 * revision server-side), but only the active one accepts edits directly.
 */
export class Session {
    segments: SegmentEdit[] = [];
    activeIndex = 0;
    submitting = false;
    readonly timer: ActiveTimer;

    constructor(readonly annotatorId: string, timer?: ActiveTimer) {
        this.timer = timer ?? new ActiveTimer();
    }

    loadDocument(activeTask: TaskView, context: TaskView[]): void {
        this.segments = context.map((task) => ({
            task,
            display: displayText(task.target_text),
            spans: task.prefill_spans.map((s) => ({ ...s })),
            score: null,
            submitted: false,
        }));
        const index = context.findIndex((t) => t.segment_id === activeTask.segment_id);
        this.activeIndex = index >= 0 ? index : 0;
        this.submitting = false;
    }

    get active(): SegmentEdit {
        const segment = this.segments[this.activeIndex];
        if (segment === undefined) {
            throw new Error("no document loaded");
        }
        return segment;
    }

    activate(index: number): void {
        if (index < 0 || index >= this.segments.length) {
            throw new Error(`segment index out of range: ${index}`);
        }
        this.activeIndex = index;
    }

    /** Click on the active segment's text: cycle the span under the cursor. */
    clickAt(offset: number): boolean {
        const segment = this.active;
        const next = cycleSeverity(segment.spans, offset);
        if (next === segment.spans) {
            return false;
        }
        segment.spans = next;
        return true;
    }

    /** Drag selection on the active segment: try to create a new span. */
    selectRange(anchor: number, focus: number): boolean {
        const segment = this.active;
        const next = createSpan(segment.spans, anchor, focus, segment.display);
        if (next === null) {
            return false;
        }
        segment.spans = next;
        return true;
    }

    setScore(value: number): void {
        const clamped = Math.min(100, Math.max(0, Math.round(value)));
        this.active.score = clamped;
    }

    spanViolations(): string[] {
        const segment = this.active;
        return segment.spans.flatMap((span) => validateSpan(span, segment.display));
    }

    /** Submission stays blocked until a score has been explicitly set. */
    canSubmit(): boolean {
        if (this.submitting || this.segments.length === 0) {
            return false;
        }
        const segment = this.active;
        return segment.score !== null && this.spanViolations().length === 0;
    }

    /** Capture the payload and mark the in-flight submission. */
    beginSubmit(): SubmitBody {
        if (!this.canSubmit()) {
            throw new Error("submission blocked: score unset, invalid spans, or already submitting");
        }
        const segment = this.active;
        this.submitting = true;
        return {
            annotator_id: this.annotatorId,
            segment_id: segment.task.segment_id,
            spans: toWireSpans(segment.spans),
            direct_score: segment.score as number,
            client_elapsed: this.timer.elapsedSeconds(),
        };
    }

    /** Server acked: advance to the next unsubmitted segment, if any. */
    completeSubmit(): void {
        this.submitting = false;
        this.active.submitted = true;
        this.timer.reset();
        const next = this.segments.findIndex((s) => !s.submitted);
        if (next >= 0) {
            this.activeIndex = next;
        }
    }

    /** Server rejected or network failed: keep everything as it was. */
    failSubmit(): void {
        this.submitting = false;
    }

    documentDone(): boolean {
        return this.segments.length > 0 && this.segments.every((s) => s.submitted);
    }
}
