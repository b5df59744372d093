// View state and its URL encoding. Refreshing reproduces any view from the
// URL alone; no UI state lives on the server.

import type { Mode, SearchRequest, TemporalRequest, Weights } from "./types.js";

export type View = "search" | "temporal";

export interface UiSearchState {
  view: View;
  query: string;
  mode: Mode;
  weights: Weights;
  alpha: number | null; // temporal override; null -> server default
  topK: number;
}

export const DEFAULT_STATE: UiSearchState = {
  view: "search",
  query: "",
  mode: "auto",
  weights: { vis: 0.8, ocr: 0.5, asr: 0.5 },
  alpha: null,
  topK: 20,
};

export function stateToParams(state: UiSearchState): URLSearchParams {
  const params = new URLSearchParams();
  if (state.view !== "search") params.set("view", state.view);
  if (state.query) params.set("q", state.query);
  if (state.mode !== "auto") params.set("mode", state.mode);
  if (state.mode === "manual") {
    params.set("vis", String(state.weights.vis));
    params.set("ocr", String(state.weights.ocr));
    params.set("asr", String(state.weights.asr));
  }
  if (state.alpha !== null) params.set("alpha", String(state.alpha));
  if (state.topK !== DEFAULT_STATE.topK) params.set("top_k", String(state.topK));
  return params;
}

function floatParam(params: URLSearchParams, key: string, fallback: number): number {
  const raw = params.get(key);
  if (raw === null) return fallback;
  const value = Number(raw);
  return Number.isFinite(value) ? value : fallback;
}

export function paramsToState(params: URLSearchParams): UiSearchState {
  const defaults = DEFAULT_STATE;
  const view: View = params.get("view") === "temporal" ? "temporal" : "search";
  const mode: Mode = params.get("mode") === "manual" ? "manual" : "auto";
  const alphaRaw = params.get("alpha");
  return {
    view,
    query: params.get("q") ?? "",
    mode,
    weights: {
      vis: floatParam(params, "vis", defaults.weights.vis),
      ocr: floatParam(params, "ocr", defaults.weights.ocr),
      asr: floatParam(params, "asr", defaults.weights.asr),
    },
    alpha: alphaRaw === null ? null : Number(alphaRaw),
    topK: Math.max(1, Math.trunc(floatParam(params, "top_k", defaults.topK))),
  };
}

// Slider values round-trip verbatim into the request body in manual mode.
export function searchRequestFromState(state: UiSearchState): SearchRequest {
  const req: SearchRequest = {
    query: state.query,
    mode: state.mode,
    top_k: state.topK,
    rerank: true,
  };
  if (state.mode === "manual") {
    req.manual_weights = { ...state.weights };
  }
  return req;
}

export function temporalRequestFromState(state: UiSearchState): TemporalRequest {
  const req: TemporalRequest = { query: state.query };
  if (state.alpha !== null) req.alpha = state.alpha;
  return req;
}
