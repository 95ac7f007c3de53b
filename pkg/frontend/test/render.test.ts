import { describe, expect, it } from "vitest";

import { ErrorSpan, displayText } from "../src/model.js";
import { anchorRowHtml, escapeHtml, segmentHtml, segmentTextHtml } from "../src/render.js";
import { SCORE_ANCHORS, SegmentEdit, TaskView } from "../src/session.js";

function span(start: number, end: number, severity: "minor" | "major" = "minor"): ErrorSpan {
    return { start, end, severity, origin: "human", on_missing: false };
}

function textContent(html: string): string {
    return html.replace(/<[^>]*>/g, "");
}

describe("segment text html", () => {
    const display = displayText("Der Hund schläft.");

    it("emits the full display text split into runs", () => {
        const html = segmentTextHtml(display, [span(4, 8)]);
        expect(textContent(html)).toBe(escapeHtml(display));
    });

    it("marks highlighted runs with their severity class", () => {
        const html = segmentTextHtml(display, [span(4, 8, "minor"), span(9, 16, "major")]);
        expect(html).toContain('class="run sev-minor" data-start="4" data-end="8">Hund<');
        expect(html).toContain('class="run sev-major" data-start="9" data-end="16">schläft<');
    });

    it("tags AI-origin highlights so they render distinctly", () => {
        const aiSpan: ErrorSpan = { ...span(4, 8), origin: "ai" };
        expect(segmentTextHtml(display, [aiSpan])).toContain('class="run sev-minor from-ai"');
    });

    it("renders the [MISSING] token as its own selectable run", () => {
        const html = segmentTextHtml(display, []);
        expect(html).toContain('class="run missing-token"');
        expect(html).toContain(">[MISSING]<");
    });

    it("escapes markup in the translation", () => {
        const hostile = displayText('x <b>&"</b>');
        const html = segmentTextHtml(hostile, []);
        expect(html).not.toContain("<b>");
        expect(html).toContain("&lt;b&gt;");
        expect(textContent(html)).toBe(escapeHtml(hostile));
    });

    it("keeps data-start offsets in scalar units around astral characters", () => {
        const emoji = displayText("a🙂b");
        const html = segmentTextHtml(emoji, [span(2, 3)]);
        expect(html).toContain('data-start="2" data-end="3">b<');
    });
});

describe("segment block html", () => {
    const task: TaskView = {
        segment_id: "doc1|0001|sysA",
        item_id: "0001|sysA",
        document_id: "doc1",
        system_id: "sysA",
        source_text: "The dog sleeps.",
        target_text: "Der Hund schläft.",
        prefill_spans: [],
        prefill_error: null,
    };
    const segment: SegmentEdit = {
        task,
        display: displayText(task.target_text),
        spans: [],
        score: null,
        submitted: false,
    };

    it("emphasizes the active segment", () => {
        expect(segmentHtml(segment, 0, true)).toContain('class="segment active"');
        expect(segmentHtml(segment, 0, false)).toContain('class="segment"');
    });

    it("shows source above target and an unset score placeholder", () => {
        const html = segmentHtml(segment, 2, false);
        expect(html.indexOf("The dog sleeps.")).toBeLessThan(html.indexOf("Der Hund"));
        expect(html).toContain('data-index="2"');
        expect(html).toContain("&ndash;");
    });

    it("flags submitted segments", () => {
        const done: SegmentEdit = { ...segment, submitted: true, score: 80 };
        const html = segmentHtml(done, 0, false);
        expect(html).toContain("submitted");
        expect(html).toContain('<span data-role="score">80</span>');
    });
});

describe("anchor row", () => {
    it("contains all four labels at their slider positions", () => {
        const html = anchorRowHtml();
        for (const anchor of SCORE_ANCHORS) {
            expect(html).toContain(`left: ${anchor.value}%`);
            expect(html).toContain(anchor.label);
        }
    });
});
