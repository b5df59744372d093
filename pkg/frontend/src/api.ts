// API client for the /v1 endpoints. Requests are validated client-side
// (mirroring the server's 400 rules) before anything goes on the wire, and
// each view keeps at most one in-flight request: issuing a new one aborts
// the previous (latest wins).

import type {
  HealthResponse,
  SearchRequest,
  SearchResponse,
  TemporalRequest,
  TemporalResponse,
  Weights,
} from "./types.js";

export class RequestValidationError extends Error {}

export class HttpError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

function validWeight(w: number): boolean {
  return Number.isFinite(w) && w >= 0 && w <= 1;
}

export function validateWeights(weights: Weights): void {
  for (const key of ["vis", "ocr", "asr"] as const) {
    if (!validWeight(weights[key])) {
      throw new RequestValidationError(`weight ${key} must be in [0, 1]`);
    }
  }
}

export function validateSearchRequest(req: SearchRequest): void {
  if (!req.query || !req.query.trim()) {
    throw new RequestValidationError("query must not be empty");
  }
  if (req.mode !== "auto" && req.mode !== "manual") {
    throw new RequestValidationError(`unknown mode ${req.mode}`);
  }
  if (req.mode === "manual") {
    if (!req.manual_weights) {
      throw new RequestValidationError("manual mode requires weights");
    }
    validateWeights(req.manual_weights);
  }
  if (req.top_k !== undefined && (!Number.isInteger(req.top_k) || req.top_k < 1)) {
    throw new RequestValidationError("top_k must be >= 1");
  }
}

export function validateTemporalRequest(req: TemporalRequest): void {
  const hasQuery = req.query !== undefined && req.query !== null;
  const hasEvents = req.events !== undefined && req.events !== null;
  if (hasQuery === hasEvents) {
    throw new RequestValidationError("provide exactly one of query or events");
  }
  if (hasQuery) {
    const events = (req.query as string).split("->").map((e) => e.trim());
    if (events.some((e) => !e)) {
      throw new RequestValidationError("empty event in query");
    }
  } else {
    const events = req.events as string[];
    if (!events.length || events.some((e) => !e.trim())) {
      throw new RequestValidationError("events must be non-empty strings");
    }
  }
  if (req.alpha !== undefined && !(Number.isFinite(req.alpha) && req.alpha >= 0)) {
    throw new RequestValidationError("alpha must be >= 0");
  }
  if (req.beam_width !== undefined && (!Number.isInteger(req.beam_width) || req.beam_width < 1)) {
    throw new RequestValidationError("beam_width must be >= 1");
  }
}

export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(readonly baseUrl: string = "") {}

  private async post<T>(view: string, path: string, body: unknown): Promise<T> {
    this.inflight.get(view)?.abort();
    const controller = new AbortController();
    this.inflight.set(view, controller);
    const resp = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal: controller.signal,
    });
    if (!resp.ok) {
      let message = `${resp.status}`;
      try {
        const errBody = await resp.json();
        if (errBody && errBody.error) message = String(errBody.error);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new HttpError(resp.status, message);
    }
    return (await resp.json()) as T;
  }

  async search(req: SearchRequest): Promise<SearchResponse> {
    validateSearchRequest(req);
    return this.post<SearchResponse>("search", "/v1/search", req);
  }

  async temporal(req: TemporalRequest): Promise<TemporalResponse> {
    validateTemporalRequest(req);
    return this.post<TemporalResponse>("temporal", "/v1/temporal", req);
  }

  async health(): Promise<HealthResponse> {
    const resp = await fetch(this.baseUrl + "/v1/health");
    if (!resp.ok) throw new HttpError(resp.status, `${resp.status}`);
    return (await resp.json()) as HealthResponse;
  }
}

export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}
