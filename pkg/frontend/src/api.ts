/**
 * Thin typed client for the campaign service HTTP endpoints.  This is the
 * only channel the UI has to the backend; there is no file access.
 */

import { ErrorSpan, fromWireSpan } from "./model.js";
import { SubmitBody, TaskView } from "./session.js";

export interface RegisterResponse {
    batch_id: string;
    done: number;
    total: number;
}

export type ClaimResponse =
    | { done: true }
    | { done: false; task: TaskView; document: TaskView[] };

export interface SubmitResponse {
    ok: boolean;
    sequence_index: number;
}

export type ProgressResponse = Record<string, unknown>;

/** Non-2xx answer from the service; `detail` carries the server's reason. */
export class ApiError extends Error {
    constructor(
        readonly status: number,
        readonly detail: unknown,
    ) {
        super(`service returned ${status}`);
        this.name = "ApiError";
    }
}

interface ResponseLike {
    status: number;
    json(): Promise<unknown>;
}

export type FetchLike = (
    url: string,
    init: { method: string; headers: Record<string, string>; body?: string },
) => Promise<ResponseLike>;

function parseTask(raw: Record<string, unknown>): TaskView {
    const spans = (raw["prefill_spans"] as Record<string, unknown>[] | undefined) ?? [];
    return {
        segment_id: String(raw["segment_id"]),
        item_id: String(raw["item_id"]),
        document_id: String(raw["document_id"]),
        system_id: String(raw["system_id"]),
        source_text: String(raw["source_text"]),
        target_text: String(raw["target_text"]),
        prefill_spans: spans.map(fromWireSpan) as ErrorSpan[],
        prefill_error: (raw["prefill_error"] as string | null) ?? null,
    };
}

export class ApiClient {
    constructor(
        private readonly baseUrl: string = "",
        private readonly token: string | null = null,
        private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
    ) {}

    private async request(method: string, path: string, body?: unknown): Promise<unknown> {
        const headers: Record<string, string> = {};
        if (body !== undefined) {
            headers["Content-Type"] = "application/json";
        }
        if (this.token !== null) {
            headers["Authorization"] = `Bearer ${this.token}`;
        }
        const response = await this.fetchFn(this.baseUrl + path, {
            method,
            headers,
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        const payload = await response.json();
        if (response.status < 200 || response.status >= 300) {
            throw new ApiError(response.status, payload);
        }
        return payload;
    }

    private post(path: string, body: unknown): Promise<unknown> {
        return this.request("POST", path, body);
    }

    async register(annotatorId: string): Promise<RegisterResponse> {
        const raw = (await this.post("/api/register", { annotator_id: annotatorId })) as Record<
            string,
            unknown
        >;
        return {
            batch_id: String(raw["batch_id"]),
            done: Number(raw["done"]),
            total: Number(raw["total"]),
        };
    }

    async claim(annotatorId: string): Promise<ClaimResponse> {
        const raw = (await this.post("/api/claim", { annotator_id: annotatorId })) as Record<
            string,
            unknown
        >;
        if (raw["done"] === true) {
            return { done: true };
        }
        const document = (raw["document"] as Record<string, unknown>[]) ?? [];
        return {
            done: false,
            task: parseTask(raw["task"] as Record<string, unknown>),
            document: document.map(parseTask),
        };
    }

    async submit(body: SubmitBody): Promise<SubmitResponse> {
        const raw = (await this.post("/api/submit", body)) as Record<string, unknown>;
        return {
            ok: Boolean(raw["ok"]),
            sequence_index: Number(raw["sequence_index"]),
        };
    }

    async progress(): Promise<ProgressResponse> {
        return (await this.request("GET", "/api/progress")) as ProgressResponse;
    }
}
