import { describe, expect, it } from "vitest";

import { ErrorSpan } from "../src/model.js";
import { ActiveTimer, SCORE_ANCHORS, Session, TaskView } from "../src/session.js";

function task(id: string, target = "Der Hund schläft auf der Matte.",
              prefill: ErrorSpan[] = []): TaskView {
    return {
        segment_id: id,
        item_id: `doc1|${id}|sysA`,
        document_id: "doc1",
        system_id: "sysA",
        source_text: "The dog sleeps on the mat.",
        target_text: target,
        prefill_spans: prefill,
        prefill_error: null,
    };
}

function freshSession(tasks: TaskView[], active = 0): Session {
    const session = new Session("annotator-1", new ActiveTimer(() => 0));
    session.loadDocument(tasks[active]!, tasks);
    return session;
}

describe("score slider anchors", () => {
    it("exposes the four anchor labels at 0/33/66/100", () => {
        expect(SCORE_ANCHORS.map((a) => [a.value, a.label])).toEqual([
            [0, "No meaning preserved"],
            [33, "Some meaning preserved"],
            [66, "Most meaning preserved and few grammar mistakes"],
            [100, "Perfect meaning and grammar"],
        ]);
    });
});

describe("submit gating", () => {
    it("blocks until a score has been explicitly set", () => {
        const session = freshSession([task("seg-1")]);
        expect(session.canSubmit()).toBe(false);
        expect(() => session.beginSubmit()).toThrow();

        session.setScore(70);
        expect(session.canSubmit()).toBe(true);
    });

    it("treats an explicit zero as a set score", () => {
        const session = freshSession([task("seg-1")]);
        session.setScore(0);
        expect(session.active.score).toBe(0);
        expect(session.canSubmit()).toBe(true);
    });

    it("clamps scores into 0..100", () => {
        const session = freshSession([task("seg-1")]);
        session.setScore(130);
        expect(session.active.score).toBe(100);
        session.setScore(-4);
        expect(session.active.score).toBe(0);
    });

    it("scores are per segment, not shared", () => {
        const session = freshSession([task("seg-1"), task("seg-2")]);
        session.setScore(55);
        session.activate(1);
        expect(session.canSubmit()).toBe(false);
    });

    it("blocks while a submission is in flight", () => {
        const session = freshSession([task("seg-1")]);
        session.setScore(80);
        session.beginSubmit();
        expect(session.canSubmit()).toBe(false);
        session.failSubmit();
        expect(session.canSubmit()).toBe(true);
    });
});

describe("submission payload", () => {
    it("carries spans, score, and accumulated active time", () => {
        let clock = 0;
        const session = new Session("annotator-9", new ActiveTimer(() => clock));
        session.loadDocument(task("seg-1"), [task("seg-1")]);
        session.selectRange(4, 8);
        session.setScore(62);
        clock = 30_000;

        const body = session.beginSubmit();
        expect(body).toEqual({
            annotator_id: "annotator-9",
            segment_id: "seg-1",
            spans: [{ start: 4, end: 8, severity: "minor", origin: "human", on_missing: false }],
            direct_score: 62,
            client_elapsed: 30,
        });
    });

    it("round-trips an unedited pre-fill byte-identically", () => {
        const prefill: ErrorSpan[] = [
            { start: 4, end: 8, severity: "major", origin: "ai", on_missing: false },
            { start: 9, end: 16, severity: "minor", origin: "ai", on_missing: false },
        ];
        const session = freshSession([task("seg-1", "Der Hund schläft.", prefill)]);
        session.setScore(40);
        const body = session.beginSubmit();
        expect(JSON.stringify(body.spans)).toBe(JSON.stringify(prefill));
    });

    it("does not alias the task's pre-fill when editing", () => {
        const prefill: ErrorSpan[] = [
            { start: 0, end: 3, severity: "minor", origin: "ai", on_missing: false },
        ];
        const t = task("seg-1", "Der Hund schläft.", prefill);
        const session = freshSession([t]);
        session.clickAt(1); // minor -> major
        expect(session.active.spans[0]!.severity).toBe("major");
        expect(t.prefill_spans[0]!.severity).toBe("minor");
    });
});

describe("document flow", () => {
    it("starts on the claimed task within its document context", () => {
        const tasks = [task("seg-1"), task("seg-2"), task("seg-3")];
        const session = freshSession(tasks, 1);
        expect(session.active.task.segment_id).toBe("seg-2");
    });

    it("advances to the next unsubmitted segment after an ack", () => {
        const tasks = [task("seg-1"), task("seg-2")];
        const session = freshSession(tasks);
        session.setScore(90);
        session.beginSubmit();
        session.completeSubmit();
        expect(session.active.task.segment_id).toBe("seg-2");
        expect(session.documentDone()).toBe(false);

        session.setScore(85);
        session.beginSubmit();
        session.completeSubmit();
        expect(session.documentDone()).toBe(true);
    });

    it("keeps earlier segments editable until the document is done", () => {
        const tasks = [task("seg-1"), task("seg-2")];
        const session = freshSession(tasks);
        session.setScore(90);
        session.beginSubmit();
        session.completeSubmit();

        session.activate(0); // go back and revise
        session.setScore(75);
        const body = session.beginSubmit();
        expect(body.segment_id).toBe("seg-1");
        expect(body.direct_score).toBe(75);
    });

    it("preserves all edits when a submission fails", () => {
        const session = freshSession([task("seg-1")]);
        session.selectRange(0, 3);
        session.setScore(20);
        session.beginSubmit();
        session.failSubmit();
        expect(session.active.spans).toHaveLength(1);
        expect(session.active.score).toBe(20);
        expect(session.active.submitted).toBe(false);
        expect(session.canSubmit()).toBe(true);
    });
});

describe("active-time accumulator", () => {
    it("advances only while the window has focus", () => {
        let clock = 0;
        const timer = new ActiveTimer(() => clock);

        clock = 4_000;
        expect(timer.elapsedSeconds()).toBe(4);

        timer.blur();
        clock = 60_000; // a minute elsewhere
        expect(timer.elapsedSeconds()).toBe(4);

        timer.focus();
        clock = 63_000;
        expect(timer.elapsedSeconds()).toBe(7);
    });

    it("never advances while the window lacks focus, at any sample point", () => {
        let clock = 0;
        const timer = new ActiveTimer(() => clock);
        timer.blur();
        for (const t of [100, 5_000, 86_400_000]) {
            clock = t;
            expect(timer.elapsedSeconds()).toBe(0);
        }
    });

    it("is idempotent under repeated focus/blur events", () => {
        let clock = 0;
        const timer = new ActiveTimer(() => clock);
        timer.focus(); // already running; must not restart the origin
        clock = 2_000;
        timer.blur();
        timer.blur();
        clock = 9_000;
        timer.focus();
        timer.focus();
        clock = 10_000;
        expect(timer.elapsedSeconds()).toBe(3);
    });

    it("is monotonic even if the clock steps backwards", () => {
        let clock = 10_000;
        const timer = new ActiveTimer(() => clock);
        clock = 15_000;
        expect(timer.elapsedSeconds()).toBe(5);
        clock = 12_000;
        expect(timer.elapsedSeconds()).toBe(5);
        clock = 16_000;
        expect(timer.elapsedSeconds()).toBe(6);
    });

    it("resets per segment after an ack", () => {
        let clock = 0;
        const session = new Session("a", new ActiveTimer(() => clock));
        session.loadDocument(task("seg-1"), [task("seg-1"), task("seg-2")]);
        clock = 12_000;
        session.setScore(50);
        expect(session.beginSubmit().client_elapsed).toBe(12);
        session.completeSubmit();

        clock = 17_000;
        session.setScore(60);
        expect(session.beginSubmit().client_elapsed).toBe(5);
    });
});
