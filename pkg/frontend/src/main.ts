/**
 * Browser entry point: wires the session model to the DOM and the campaign
 * service.  All annotation logic lives in model.ts/session.ts; this file
 * only translates DOM events into model calls and re-renders.
 */

import { ApiClient, ApiError } from "./api.js";
import { utf16ToScalar } from "./model.js";
import { anchorRowHtml, segmentHtml } from "./render.js";
import { Session } from "./session.js";

function query(name: string): string | null {
    return new URLSearchParams(window.location.search).get(name);
}

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (node === null) {
        throw new Error(`missing element #${id}`);
    }
    return node as T;
}

const annotatorId = query("annotator") ?? window.prompt("Annotator id:") ?? "";
const api = new ApiClient("", query("token"));
const session = new Session(annotatorId);

const segmentsBox = el<HTMLDivElement>("segments");
const slider = el<HTMLInputElement>("score");
const sliderBox = el<HTMLDivElement>("score-box");
const submitButton = el<HTMLButtonElement>("submit");
const banner = el<HTMLDivElement>("banner");
const statusLine = el<HTMLDivElement>("status");

sliderBox.insertAdjacentHTML("beforeend", anchorRowHtml());

function showBanner(text: string, isError: boolean): void {
    banner.textContent = text;
    banner.className = isError ? "banner error" : "banner";
    banner.hidden = text === "";
}

function render(): void {
    segmentsBox.innerHTML = session.segments
        .map((segment, i) => segmentHtml(segment, i, i === session.activeIndex))
        .join("\n");
    const active = session.segments[session.activeIndex];
    if (active !== undefined && active.score !== null) {
        slider.value = String(active.score);
        slider.classList.add("touched");
    } else {
        slider.value = "50";
        slider.classList.remove("touched");
    }
    submitButton.disabled = !session.canSubmit();
}

/** Map a DOM position inside a rendered run back to a scalar offset. */
function scalarOffsetAt(node: Node, offsetInNode: number): number | null {
    let element: HTMLElement | null =
        node.nodeType === Node.TEXT_NODE ? node.parentElement : (node as HTMLElement);
    while (element !== null && element.dataset["start"] === undefined) {
        element = element.parentElement;
    }
    if (element === null) {
        return null;
    }
    const runStart = Number(element.dataset["start"]);
    const text = node.textContent ?? "";
    return runStart + utf16ToScalar(text, offsetInNode);
}

function activeTargetBox(): HTMLElement | null {
    return segmentsBox.querySelector(
        `.segment[data-index="${session.activeIndex}"] [data-role="target"]`,
    );
}

function handleMouseUp(): void {
    const selection = window.getSelection();
    if (selection === null || selection.rangeCount === 0 || session.segments.length === 0) {
        return;
    }
    const range = selection.getRangeAt(0);
    const box = activeTargetBox();
    if (box === null || !box.contains(range.startContainer) || !box.contains(range.endContainer)) {
        return;
    }
    const start = scalarOffsetAt(range.startContainer, range.startOffset);
    const end = scalarOffsetAt(range.endContainer, range.endOffset);
    if (start === null || end === null) {
        return;
    }
    const changed = range.collapsed ? session.clickAt(start) : session.selectRange(start, end);
    if (changed) {
        selection.removeAllRanges();
        render();
    }
}

function handleSegmentClick(event: MouseEvent): void {
    const target = event.target as HTMLElement;
    const block = target.closest<HTMLElement>(".segment");
    if (block === null) {
        return;
    }
    const index = Number(block.dataset["index"]);
    if (index !== session.activeIndex) {
        session.activate(index);
        render();
    }
}

async function refreshStatus(): Promise<void> {
    try {
        const progress = await api.progress();
        statusLine.textContent = `annotated ${String(progress["annotated"])} of ${String(progress["total"])}`;
    } catch {
        statusLine.textContent = "";
    }
}

async function claimNext(): Promise<void> {
    const claimed = await api.claim(annotatorId);
    if (claimed.done) {
        segmentsBox.innerHTML = "<p class='done'>All assigned segments are annotated. Thank you!</p>";
        submitButton.disabled = true;
        showBanner("", false);
        return;
    }
    session.loadDocument(claimed.task, claimed.document);
    session.timer.reset();
    showBanner("", false);
    render();
}

async function handleSubmit(): Promise<void> {
    if (!session.canSubmit()) {
        return;
    }
    const body = session.beginSubmit();
    render();
    try {
        await api.submit(body);
        session.completeSubmit();
        showBanner("", false);
        if (session.documentDone()) {
            await claimNext();
        } else {
            render();
        }
        void refreshStatus();
    } catch (error) {
        session.failSubmit();
        if (error instanceof ApiError) {
            showBanner(`rejected: ${JSON.stringify(error.detail)}`, true);
        } else {
            showBanner("network failure; your edits are preserved, press Submit to retry", true);
        }
        render();
    }
}

async function start(): Promise<void> {
    if (annotatorId === "") {
        showBanner("no annotator id; reload with ?annotator=<id>", true);
        return;
    }
    try {
        const registered = await api.register(annotatorId);
        statusLine.textContent = `batch ${registered.batch_id}: ${registered.done} of ${registered.total} done`;
        await claimNext();
    } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
            showBanner("no batches left for new annotators", true);
        } else {
            showBanner("cannot reach the campaign service", true);
        }
    }
}

segmentsBox.addEventListener("mouseup", handleMouseUp);
segmentsBox.addEventListener("click", handleSegmentClick);
slider.addEventListener("input", () => {
    session.setScore(Number(slider.value));
    render();
});
submitButton.addEventListener("click", () => {
    void handleSubmit();
});
window.addEventListener("blur", () => session.timer.blur());
window.addEventListener("focus", () => session.timer.focus());

void start();
