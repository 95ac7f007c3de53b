import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, FetchLike } from "../src/api.js";

interface Recorded {
    url: string;
    method: string;
    headers: Record<string, string>;
    body?: string;
}

/** Canned-response fetch double that records every request it sees. */
function fakeFetch(
    responses: { status: number; payload: unknown }[],
): { fetch: FetchLike; calls: Recorded[] } {
    const calls: Recorded[] = [];
    const fetch: FetchLike = (url, init) => {
        calls.push({ url, method: init.method, headers: init.headers, body: init.body });
        const next = responses.shift() ?? { status: 500, payload: { detail: "exhausted" } };
        return Promise.resolve({
            status: next.status,
            json: () => Promise.resolve(next.payload),
        });
    };
    return { fetch, calls };
}

const wireSpan = { start: 2, end: 6, severity: "minor", origin: "ai", on_missing: false };

const wireTask = {
    segment_id: "doc1|0001|sysA",
    item_id: "0001|sysA",
    document_id: "doc1",
    system_id: "sysA",
    source_text: "Good morning.",
    target_text: "Guten Morgen.",
    prefill_spans: [wireSpan],
    check_info: null,
    prefill_error: null,
};

describe("register", () => {
    it("posts the annotator id and parses the batch summary", async () => {
        const { fetch, calls } = fakeFetch([
            { status: 200, payload: { batch_id: "batch-0", done: 3, total: 40 } },
        ]);
        const client = new ApiClient("", null, fetch);
        const result = await client.register("ann-1");

        expect(result).toEqual({ batch_id: "batch-0", done: 3, total: 40 });
        expect(calls[0]!.url).toBe("/api/register");
        expect(calls[0]!.method).toBe("POST");
        expect(JSON.parse(calls[0]!.body!)).toEqual({ annotator_id: "ann-1" });
    });

    it("surfaces a 409 when no batches are left", async () => {
        const { fetch } = fakeFetch([{ status: 409, payload: { detail: "no batches left" } }]);
        const client = new ApiClient("", null, fetch);
        const error = await client.register("ann-1").catch((e: unknown) => e);

        expect(error).toBeInstanceOf(ApiError);
        expect((error as ApiError).status).toBe(409);
        expect((error as ApiError).detail).toEqual({ detail: "no batches left" });
    });
});

describe("claim", () => {
    it("parses the active task and its document context", async () => {
        const { fetch } = fakeFetch([
            { status: 200, payload: { done: false, task: wireTask, document: [wireTask] } },
        ]);
        const client = new ApiClient("", null, fetch);
        const result = await client.claim("ann-1");

        expect(result.done).toBe(false);
        if (!result.done) {
            expect(result.task.segment_id).toBe("doc1|0001|sysA");
            expect(result.task.prefill_spans).toEqual([wireSpan]);
            expect(result.document).toHaveLength(1);
        }
    });

    it("passes the done marker through", async () => {
        const { fetch } = fakeFetch([{ status: 200, payload: { done: true } }]);
        const client = new ApiClient("", null, fetch);
        expect(await client.claim("ann-1")).toEqual({ done: true });
    });
});

describe("submit", () => {
    it("sends the payload as-is and parses the ack", async () => {
        const { fetch, calls } = fakeFetch([
            { status: 200, payload: { ok: true, sequence_index: 7 } },
        ]);
        const client = new ApiClient("", null, fetch);
        const body = {
            annotator_id: "ann-1",
            segment_id: "doc1|0001|sysA",
            spans: [{ ...wireSpan, severity: "major" as const, origin: "human" as const }],
            direct_score: 55,
            client_elapsed: 21.5,
        };
        const ack = await client.submit(body);

        expect(ack).toEqual({ ok: true, sequence_index: 7 });
        expect(calls[0]!.url).toBe("/api/submit");
        expect(JSON.parse(calls[0]!.body!)).toEqual(body);
    });

    it("raises ApiError with the validation detail on 422", async () => {
        const detail = { detail: "span invalid: end <= display length" };
        const { fetch } = fakeFetch([{ status: 422, payload: detail }]);
        const client = new ApiClient("", null, fetch);
        const error = await client
            .submit({
                annotator_id: "ann-1",
                segment_id: "s",
                spans: [],
                direct_score: 50,
                client_elapsed: 1,
            })
            .catch((e: unknown) => e);

        expect(error).toBeInstanceOf(ApiError);
        expect((error as ApiError).status).toBe(422);
        expect((error as ApiError).detail).toEqual(detail);
    });
});

describe("transport details", () => {
    it("prefixes the base URL and attaches the bearer token everywhere", async () => {
        const { fetch, calls } = fakeFetch([
            { status: 200, payload: { batch_id: "b", done: 0, total: 1 } },
            { status: 200, payload: {} },
        ]);
        const client = new ApiClient("http://127.0.0.1:8010", "s3cret", fetch);
        await client.register("ann-1");
        await client.progress();

        expect(calls[0]!.url).toBe("http://127.0.0.1:8010/api/register");
        expect(calls[0]!.headers["Authorization"]).toBe("Bearer s3cret");
        expect(calls[1]!.headers["Authorization"]).toBe("Bearer s3cret");
    });

    it("fetches progress with GET and no body", async () => {
        const { fetch, calls } = fakeFetch([{ status: 200, payload: { annotated: 2 } }]);
        const client = new ApiClient("", null, fetch);
        const progress = await client.progress();

        expect(progress["annotated"]).toBe(2);
        expect(calls[0]!.method).toBe("GET");
        expect(calls[0]!.url).toBe("/api/progress");
        expect(calls[0]!.body).toBeUndefined();
        expect(calls[0]!.headers["Content-Type"]).toBeUndefined();
    });

    it("propagates transport failures unchanged", async () => {
        const failing: FetchLike = () => Promise.reject(new TypeError("fetch failed"));
        const client = new ApiClient("", null, failing);
        const error = await client.progress().catch((e: unknown) => e);
        expect(error).toBeInstanceOf(TypeError);
    });
});
