/**
 * Span editing model for a single segment.
 *
 * Offsets are Unicode scalar offsets into the display text (the translation
 * plus the trailing " [MISSING]" token), matching what the service stores.
 * JavaScript strings index UTF-16 code units, so the DOM layer must convert
 * at the boundary; everything in this module already speaks scalar offsets.
 */

export type Severity = "minor" | "major";
export type SpanOrigin = "human" | "ai";

export interface ErrorSpan {
    start: number;
    end: number;
    severity: Severity;
    origin: SpanOrigin;
    on_missing: boolean;
}

export type VisualState = "minor-highlight" | "major-highlight" | "none";

export const MISSING_TOKEN = "[MISSING]";
export const MISSING_SUFFIX = " " + MISSING_TOKEN;

export function displayText(targetText: string): string {
    return targetText + MISSING_SUFFIX;
}

/** Interval of the " [MISSING]" suffix in scalar offsets, or null if absent. */
export function missingRegion(display: string): [number, number] | null {
    if (!display.endsWith(MISSING_SUFFIX)) {
        return null;
    }
    const total = scalarLength(display);
    return [total - scalarLength(MISSING_SUFFIX), total];
}

/** Interval of the [MISSING] token itself (without the leading space). */
export function missingTokenSpan(display: string): [number, number] {
    const region = missingRegion(display);
    if (region === null) {
        throw new Error("display text has no [MISSING] suffix");
    }
    return [region[0] + 1, region[1]];
}

// ---------------------------------------------------------------------------
// scalar offset <-> UTF-16 index conversion

export function scalarLength(text: string): number {
    let n = 0;
    for (const _ of text) {
        n += 1;
    }
    return n;
}

/** UTF-16 index of the scalar at `scalar`; clamps past the end of `text`. */
export function scalarToUtf16(text: string, scalar: number): number {
    let index = 0;
    let seen = 0;
    for (const ch of text) {
        if (seen >= scalar) {
            return index;
        }
        seen += 1;
        index += ch.length;
    }
    return text.length;
}

/** Scalar offset of the code point containing UTF-16 index `index`. */
export function utf16ToScalar(text: string, index: number): number {
    let at = 0;
    let scalar = 0;
    for (const ch of text) {
        if (index < at + ch.length) {
            return scalar;
        }
        at += ch.length;
        scalar += 1;
    }
    return scalar;
}

/** Substring by scalar offsets, the moral equivalent of Python slicing. */
export function sliceScalars(text: string, start: number, end: number): string {
    return text.slice(scalarToUtf16(text, start), scalarToUtf16(text, end));
}

// ---------------------------------------------------------------------------
// span operations

export function spanAt(spans: readonly ErrorSpan[], offset: number): ErrorSpan | null {
    for (const span of spans) {
        if (span.start <= offset && offset < span.end) {
            return span;
        }
    }
    return null;
}

export function visualState(spans: readonly ErrorSpan[], offset: number): VisualState {
    const span = spanAt(spans, offset);
    if (span === null) {
        return "none";
    }
    return span.severity === "minor" ? "minor-highlight" : "major-highlight";
}

/**
 * One click on a highlighted region: Minor -> Major -> removed.
 *
 * Returns the input array unchanged (same reference) when the click lands
 * outside every span, so callers can cheaply detect "nothing happened".
 * Severity edits keep the span's origin: a retouched AI span stays "ai".
 */
export function cycleSeverity(spans: readonly ErrorSpan[], offset: number): readonly ErrorSpan[] {
    const hit = spanAt(spans, offset);
    if (hit === null) {
        return spans;
    }
    if (hit.severity === "minor") {
        return spans.map((s) => (s === hit ? { ...s, severity: "major" as Severity } : s));
    }
    return spans.filter((s) => s !== hit);
}

/**
 * Turn a selection into a new Minor human-origin span, or null if the
 * selection cannot become one (zero width, out of bounds, reversed into
 * nothing after clamping).
 *
 * A selection that falls entirely inside the " [MISSING]" suffix snaps to
 * the [MISSING] token and is flagged on_missing; a selection that straddles
 * the boundary is clamped to the translation part, so a sloppy drag past the
 * end never silently marks a missing-word error.
 */
export function createSpan(
    spans: readonly ErrorSpan[],
    anchor: number,
    focus: number,
    display: string,
): readonly ErrorSpan[] | null {
    let start = Math.min(anchor, focus);
    let end = Math.max(anchor, focus);
    const total = scalarLength(display);
    if (start < 0 || end > total) {
        return null;
    }

    const region = missingRegion(display);
    let onMissing = false;
    if (region !== null) {
        if (start >= region[0]) {
            const token = missingTokenSpan(display);
            start = token[0];
            end = token[1];
            onMissing = true;
        } else if (end > region[0]) {
            end = region[0];
        }
    }
    if (start >= end) {
        return null;
    }

    const span: ErrorSpan = {
        start,
        end,
        severity: "minor",
        origin: "human",
        on_missing: onMissing,
    };
    return [...spans, span];
}

/** Mirror of the service-side validator; empty list means the span is valid. */
export function validateSpan(span: ErrorSpan, display: string): string[] {
    const violations: string[] = [];
    if (span.start < 0) {
        violations.push("start >= 0");
    }
    if (!(span.start < span.end)) {
        violations.push("start < end");
    }
    if (!(span.end <= scalarLength(display))) {
        violations.push("end <= display length");
    }
    if (span.on_missing) {
        const region = missingRegion(display);
        if (region === null || !(region[0] <= span.start && span.end <= region[1])) {
            violations.push("on_missing span within [MISSING] suffix");
        }
    }
    return violations;
}

// ---------------------------------------------------------------------------
// wire format

/**
 * Serialize spans exactly as the service emits them, same keys in the same
 * order, so an unedited pre-fill survives the round trip byte-identically.
 */
export function toWireSpans(spans: readonly ErrorSpan[]): ErrorSpan[] {
    return spans.map((s) => ({
        start: s.start,
        end: s.end,
        severity: s.severity,
        origin: s.origin,
        on_missing: s.on_missing,
    }));
}

export function fromWireSpan(raw: Record<string, unknown>): ErrorSpan {
    const severity = raw["severity"];
    const origin = raw["origin"];
    if (severity !== "minor" && severity !== "major") {
        throw new Error(`unknown severity: ${String(severity)}`);
    }
    if (origin !== "human" && origin !== "ai") {
        throw new Error(`unknown origin: ${String(origin)}`);
    }
    return {
        start: Number(raw["start"]),
        end: Number(raw["end"]),
        severity,
        origin,
        on_missing: Boolean(raw["on_missing"]),
    };
}
