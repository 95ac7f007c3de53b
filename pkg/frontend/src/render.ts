/**
 * HTML generation for the annotation view.  Pure string-in string-out so the
 * highlight layout is testable without a browser; main.ts owns all DOM
 * wiring and event handling.
 */

import { ErrorSpan, missingRegion, scalarLength, sliceScalars, spanAt } from "./model.js";
import { SCORE_ANCHORS, SegmentEdit } from "./session.js";

export function escapeHtml(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

function boundaries(display: string, spans: readonly ErrorSpan[]): number[] {
    const cuts = new Set<number>([0, scalarLength(display)]);
    const region = missingRegion(display);
    if (region !== null) {
        cuts.add(region[0]);
        cuts.add(region[0] + 1);
    }
    for (const span of spans) {
        cuts.add(span.start);
        cuts.add(span.end);
    }
    return [...cuts].sort((a, b) => a - b);
}

/**
 * The display text split into runs at span and [MISSING] boundaries, each
 * run wrapped according to the span covering it.  Every run carries its
 * scalar start offset in data-start so click handlers can map DOM positions
 * back to model offsets.
 */
export function segmentTextHtml(display: string, spans: readonly ErrorSpan[]): string {
    const cuts = boundaries(display, spans);
    const region = missingRegion(display);
    const parts: string[] = [];
    for (let i = 0; i + 1 < cuts.length; i += 1) {
        const start = cuts[i]!;
        const end = cuts[i + 1]!;
        const text = escapeHtml(sliceScalars(display, start, end));
        const covering = spanAt(spans, start);
        const classes: string[] = ["run"];
        if (covering !== null) {
            classes.push(covering.severity === "minor" ? "sev-minor" : "sev-major");
            if (covering.origin === "ai") {
                classes.push("from-ai");
            }
        }
        if (region !== null && start >= region[0] + 1) {
            classes.push("missing-token");
        }
        parts.push(`<span class="${classes.join(" ")}" data-start="${start}" data-end="${end}">${text}</span>`);
    }
    return parts.join("");
}

export function segmentHtml(segment: SegmentEdit, index: number, isActive: boolean): string {
    const cls = ["segment"];
    if (isActive) {
        cls.push("active");
    }
    if (segment.submitted) {
        cls.push("submitted");
    }
    const score = segment.score === null ? "&ndash;" : String(segment.score);
    return [
        `<div class="${cls.join(" ")}" data-index="${index}">`,
        `<div class="source">${escapeHtml(segment.task.source_text)}</div>`,
        `<div class="target" data-role="target">${segmentTextHtml(segment.display, segment.spans)}</div>`,
        `<div class="meta">score: <span data-role="score">${score}</span></div>`,
        `</div>`,
    ].join("\n");
}

/** Anchor labels pinned under the slider at their percentage positions. */
export function anchorRowHtml(): string {
    const items = SCORE_ANCHORS.map(
        (a) =>
            `<span class="anchor" style="left: ${a.value}%" data-value="${a.value}">${escapeHtml(a.label)}</span>`,
    );
    return `<div class="anchors">${items.join("")}</div>`;
}
