// Page wiring: bind controls, reflect state in the URL, and render
// responses. One in-flight request per view; aborted (superseded) requests
// are dropped silently.

import { ApiClient, HttpError, RequestValidationError, isAbort } from "./api.js";
import {
  DEFAULT_STATE,
  UiSearchState,
  paramsToState,
  searchRequestFromState,
  stateToParams,
  temporalRequestFromState,
} from "./state.js";
import {
  renderContextPanel,
  renderDegradedBadge,
  renderErrorBanner,
  renderPlan,
  renderResultsGrid,
  renderTimeline,
  renderEmptyState,
} from "./render.js";
import type { ResultCandidate, SearchResponse } from "./types.js";

const api = new ApiClient();
let state: UiSearchState = { ...DEFAULT_STATE };
let lastSearch: SearchResponse | null = null;

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function syncUrl(): void {
  const params = stateToParams(state);
  const query = params.toString();
  history.replaceState(null, "", query ? `?${query}` : location.pathname);
}

function syncControls(): void {
  ($("query") as HTMLInputElement).value = state.query;
  ($("mode-manual") as HTMLInputElement).checked = state.mode === "manual";
  $("sliders").classList.toggle("disabled", state.mode !== "manual");
  for (const m of ["vis", "ocr", "asr"] as const) {
    const slider = $(`w-${m}`) as HTMLInputElement;
    slider.disabled = state.mode !== "manual";
    slider.value = String(state.weights[m]);
    $(`w-${m}-value`).textContent = state.weights[m].toFixed(2);
  }
  ($("alpha") as HTMLInputElement).value = state.alpha === null ? "" : String(state.alpha);
  ($("tab-search") as HTMLButtonElement).classList.toggle("active", state.view === "search");
  ($("tab-temporal") as HTMLButtonElement).classList.toggle("active", state.view === "temporal");
}

function showStatus(node: HTMLElement | null): void {
  const slot = $("status");
  slot.replaceChildren();
  if (node) slot.appendChild(node);
}

function onSelect(candidate: ResultCandidate): void {
  if (!lastSearch) return;
  $("context").replaceChildren(renderContextPanel(candidate, lastSearch));
}

async function runSearch(): Promise<void> {
  const output = $("output");
  try {
    const response = await api.search(searchRequestFromState(state));
    lastSearch = response;
    showStatus(response.degraded ? renderDegradedBadge() : null);
    $("plan").replaceChildren(renderPlan(response.plan));
    output.replaceChildren(renderResultsGrid(response, onSelect));
    $("context").replaceChildren();
  } catch (err) {
    handleError(err, runSearch);
  }
}

async function runTemporal(): Promise<void> {
  const output = $("output");
  try {
    const response = await api.temporal(temporalRequestFromState(state));
    showStatus(response.degraded ? renderDegradedBadge() : null);
    $("plan").replaceChildren(renderPlan(response.plan));
    output.replaceChildren(renderTimeline(response));
    $("context").replaceChildren();
  } catch (err) {
    if (err instanceof HttpError && err.status === 404) {
      showStatus(null);
      output.replaceChildren(renderEmptyState("no coherent sequence found"));
      return;
    }
    handleError(err, runTemporal);
  }
}

function handleError(err: unknown, retry: () => void): void {
  if (isAbort(err)) return; // superseded by a newer request
  const message =
    err instanceof RequestValidationError ? `invalid request: ${err.message}`
    : err instanceof HttpError ? `service error ${err.status}: ${err.message}`
    : `unexpected error: ${String(err)}`;
  showStatus(renderErrorBanner(message, retry));
}

function submit(): void {
  syncUrl();
  if (!state.query.trim()) return;
  if (state.view === "search") void runSearch();
  else void runTemporal();
}

function bind(): void {
  ($("query") as HTMLInputElement).addEventListener("change", (e) => {
    state.query = (e.target as HTMLInputElement).value;
  });
  $("go").addEventListener("click", submit);
  $("query").addEventListener("keydown", (e) => {
    if ((e as KeyboardEvent).key === "Enter") submit();
  });
  ($("mode-manual") as HTMLInputElement).addEventListener("change", (e) => {
    state.mode = (e.target as HTMLInputElement).checked ? "manual" : "auto";
    syncControls();
  });
  for (const m of ["vis", "ocr", "asr"] as const) {
    ($(`w-${m}`) as HTMLInputElement).addEventListener("input", (e) => {
      state.weights[m] = Number((e.target as HTMLInputElement).value);
      $(`w-${m}-value`).textContent = state.weights[m].toFixed(2);
    });
  }
  ($("alpha") as HTMLInputElement).addEventListener("change", (e) => {
    const raw = (e.target as HTMLInputElement).value.trim();
    state.alpha = raw === "" ? null : Number(raw);
    if (state.view === "temporal") submit(); // re-issue with the override
  });
  $("tab-search").addEventListener("click", () => {
    state.view = "search";
    syncControls();
    submit();
  });
  $("tab-temporal").addEventListener("click", () => {
    state.view = "temporal";
    syncControls();
    submit();
  });
}

export function start(): void {
  state = paramsToState(new URLSearchParams(location.search));
  bind();
  syncControls();
  void api.health().then((health) => {
    const corpus = health.corpus;
    $("corpus-info").textContent = corpus
      ? `${corpus.videos} videos, ${corpus.keyframes} keyframes`
      : "no corpus loaded";
  }).catch(() => {
    $("corpus-info").textContent = "service unreachable";
  });
  if (state.query) submit();
}

// happy-dom test imports call start() explicitly
if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
