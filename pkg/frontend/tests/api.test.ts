// Client-side validation mirrors the server's 400 rules; request bodies
// carry slider values verbatim; latest request wins.

import { afterEach, describe, expect, it, vi } from "vitest";

import {
  ApiClient,
  HttpError,
  RequestValidationError,
  isAbort,
  validateSearchRequest,
  validateTemporalRequest,
} from "../src/api.js";
import type { SearchResponse } from "../src/types.js";

const emptyResponse: SearchResponse = {
  results: [],
  plan: {
    original: "q", expansions: ["q"], sub_queries: { vis: "q" },
    weights: { vis: 0.8, ocr: 0, asr: 0 }, events: null,
    rationale: "", source: "rule_based",
  },
  degraded: false,
  timings_ms: {},
};

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => vi.unstubAllGlobals());

describe("request bodies", () => {
  it("sends manual slider values verbatim", async () => {
    const seen: unknown[] = [];
    vi.stubGlobal("fetch", async (_url: string, init: RequestInit) => {
      seen.push(JSON.parse(init.body as string));
      return jsonResponse(emptyResponse);
    });
    const client = new ApiClient();
    await client.search({
      query: "red car",
      mode: "manual",
      manual_weights: { vis: 0.35, ocr: 0.15, asr: 0.95 },
      top_k: 7,
      rerank: true,
    });
    expect(seen).toHaveLength(1);
    expect(seen[0]).toEqual({
      query: "red car",
      mode: "manual",
      manual_weights: { vis: 0.35, ocr: 0.15, asr: 0.95 },
      top_k: 7,
      rerank: true,
    });
  });

  it("posts temporal overrides as given", async () => {
    const seen: unknown[] = [];
    vi.stubGlobal("fetch", async (_url: string, init: RequestInit) => {
      seen.push(JSON.parse(init.body as string));
      return jsonResponse({ sequences: [], plan: emptyResponse.plan, degraded: false, timings_ms: {} });
    });
    await new ApiClient().temporal({ query: "a -> b", alpha: 0.02 });
    expect(seen[0]).toEqual({ query: "a -> b", alpha: 0.02 });
  });
});

describe("validation mirrors server 400 rules", () => {
  it("rejects empty query", () => {
    expect(() => validateSearchRequest({ query: "  ", mode: "auto" }))
      .toThrow(RequestValidationError);
  });

  it("rejects top_k < 1", () => {
    expect(() => validateSearchRequest({ query: "q", mode: "auto", top_k: 0 }))
      .toThrow(RequestValidationError);
  });

  it("rejects manual mode without weights", () => {
    expect(() => validateSearchRequest({ query: "q", mode: "manual" }))
      .toThrow(RequestValidationError);
  });

  it("rejects out-of-range weights", () => {
    expect(() => validateSearchRequest({
      query: "q", mode: "manual", manual_weights: { vis: 1.4, ocr: 0, asr: 0 },
    })).toThrow(RequestValidationError);
  });

  it("rejects temporal with both query and events", () => {
    expect(() => validateTemporalRequest({ query: "a -> b", events: ["a"] }))
      .toThrow(RequestValidationError);
  });

  it("rejects temporal with neither query nor events", () => {
    expect(() => validateTemporalRequest({})).toThrow(RequestValidationError);
  });

  it("rejects empty events inside a query", () => {
    expect(() => validateTemporalRequest({ query: "a -> -> b" }))
      .toThrow(RequestValidationError);
  });

  it("never puts an invalid request on the wire", async () => {
    const calls: unknown[] = [];
    vi.stubGlobal("fetch", async () => { calls.push(1); return jsonResponse({}); });
    await expect(new ApiClient().search({ query: "q", mode: "manual" }))
      .rejects.toThrow(RequestValidationError);
    expect(calls).toHaveLength(0);
  });
});

describe("error and cancellation behaviour", () => {
  it("maps HTTP errors with status and message", async () => {
    vi.stubGlobal("fetch", async () => jsonResponse({ error: "no corpus loaded" }, 409));
    const err = await new ApiClient().search({ query: "q", mode: "auto" })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(HttpError);
    expect((err as HttpError).status).toBe(409);
    expect((err as HttpError).message).toBe("no corpus loaded");
  });

  it("aborts the previous in-flight search (latest wins)", async () => {
    let calls = 0;
    vi.stubGlobal("fetch", (_url: string, init: RequestInit) => {
      calls += 1;
      const delay = calls === 1 ? 50 : 1;
      return new Promise<Response>((resolve, reject) => {
        init.signal?.addEventListener("abort", () =>
          reject(new DOMException("aborted", "AbortError")));
        setTimeout(() => resolve(jsonResponse(emptyResponse)), delay);
      });
    });
    const client = new ApiClient();
    const first = client.search({ query: "first", mode: "auto" }).catch((e: unknown) => e);
    const second = client.search({ query: "second", mode: "auto" });
    await expect(second).resolves.toBeTruthy();
    const firstOutcome = await first;
    expect(isAbort(firstOutcome)).toBe(true);
  });
});
