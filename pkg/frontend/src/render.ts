// DOM builders for the two views. Pure functions: element in, element out;
// event wiring happens through the callbacks the caller passes in.

import type {
  FinalSequence,
  Plan,
  ResultCandidate,
  SearchResponse,
  SequenceEvent,
  TemporalResponse,
} from "./types.js";

const MODALITIES = ["vis", "ocr", "asr"] as const;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderDegradedBadge(): HTMLElement {
  const badge = el("span", "badge degraded", "degraded");
  badge.title = "an external dependency failed; a deterministic fallback answered";
  return badge;
}

export function renderErrorBanner(message: string, onRetry: () => void): HTMLElement {
  const banner = el("div", "banner error");
  banner.appendChild(el("span", "", message));
  const retry = el("button", "retry", "retry");
  retry.addEventListener("click", onRetry);
  banner.appendChild(retry);
  return banner;
}

export function renderEmptyState(message: string): HTMLElement {
  return el("div", "empty-state", message);
}

export function renderPlan(plan: Plan): HTMLElement {
  const panel = el("div", "plan");
  const weights = el("div", "plan-weights");
  for (const m of MODALITIES) {
    const chip = el("span", `weight-chip weight-${m}`);
    chip.dataset.modality = m;
    chip.dataset.value = String(plan.weights[m]);
    chip.textContent = `${m} ${plan.weights[m].toFixed(2)}`;
    weights.appendChild(chip);
  }
  panel.appendChild(weights);
  const subs = el("dl", "plan-subqueries");
  for (const m of MODALITIES) {
    const sub = plan.sub_queries[m];
    if (!sub) continue;
    subs.appendChild(el("dt", "", m));
    subs.appendChild(el("dd", "", sub));
  }
  panel.appendChild(subs);
  if (plan.rationale) panel.appendChild(el("p", "plan-rationale", plan.rationale));
  panel.appendChild(el("p", "plan-source", `planner: ${plan.source}`));
  return panel;
}

function scoreBars(candidate: ResultCandidate): HTMLElement {
  const bars = el("div", "score-bars");
  for (const m of MODALITIES) {
    const value = candidate.normalized[m];
    if (value === undefined) continue;
    const row = el("div", "score-bar");
    row.appendChild(el("span", "score-label", m));
    const track = el("div", "score-track");
    const fill = el("div", `score-fill score-${m}`);
    fill.style.width = `${Math.round(value * 100)}%`;
    fill.dataset.value = String(value);
    track.appendChild(fill);
    row.appendChild(track);
    row.appendChild(el("span", "score-value", value.toFixed(3)));
    bars.appendChild(row);
  }
  return bars;
}

function thumbnail(candidate: ResultCandidate): HTMLElement {
  if (candidate.image_uri) {
    const img = el("img", "thumb") as HTMLImageElement;
    img.src = candidate.image_uri;
    img.alt = candidate.caption ?? candidate.keyframe_id;
    return img;
  }
  // synthetic corpora have no images; show the caption card instead
  return el("div", "thumb caption-card", candidate.caption ?? candidate.keyframe_id);
}

export function renderResultsGrid(
  response: SearchResponse,
  onSelect: (candidate: ResultCandidate) => void,
): HTMLElement {
  const grid = el("div", "results-grid");
  if (!response.results.length) {
    grid.appendChild(renderEmptyState("no results"));
    return grid;
  }
  response.results.forEach((candidate, i) => {
    const card = el("div", "result-card");
    card.dataset.keyframeId = candidate.keyframe_id;
    card.appendChild(el("span", "rank", `#${i + 1}`));
    card.appendChild(thumbnail(candidate));
    const meta = el("div", "result-meta");
    meta.appendChild(el("div", "result-id", candidate.keyframe_id));
    if (candidate.timestamp_s !== undefined) {
      meta.appendChild(el("div", "result-time",
        `${candidate.video_id ?? "?"} @ ${candidate.timestamp_s.toFixed(1)}s`));
    }
    meta.appendChild(el("div", "result-fused", `fused ${candidate.fused.toFixed(4)}`));
    card.appendChild(meta);
    card.appendChild(scoreBars(candidate));
    card.addEventListener("click", () => onSelect(candidate));
    grid.appendChild(card);
  });
  return grid;
}

// Video/shot context for a clicked result: its keyframe fields plus the
// same-video results of the current response, adjacent by timestamp.
export function renderContextPanel(
  selected: ResultCandidate,
  response: SearchResponse,
): HTMLElement {
  const panel = el("div", "context-panel");
  panel.appendChild(el("h3", "", `${selected.keyframe_id}`));
  const facts = el("dl", "context-facts");
  const rows: Array<[string, string]> = [
    ["video", selected.video_id ?? "?"],
    ["shot", selected.shot_id ?? "?"],
    ["time", selected.timestamp_s !== undefined ? `${selected.timestamp_s.toFixed(1)}s` : "?"],
  ];
  if (selected.caption) rows.push(["caption", selected.caption]);
  for (const [k, v] of rows) {
    facts.appendChild(el("dt", "", k));
    facts.appendChild(el("dd", "", v));
  }
  panel.appendChild(facts);
  const siblings = response.results
    .filter((c) => c.video_id === selected.video_id && c.timestamp_s !== undefined)
    .sort((a, b) => (a.timestamp_s ?? 0) - (b.timestamp_s ?? 0));
  if (siblings.length > 1) {
    panel.appendChild(el("h4", "", "same video, by time"));
    const strip = el("div", "context-strip");
    for (const sib of siblings) {
      const chip = el("span",
        sib.keyframe_id === selected.keyframe_id ? "context-chip current" : "context-chip",
        `${sib.timestamp_s?.toFixed(1)}s`);
      chip.title = sib.caption ?? sib.keyframe_id;
      strip.appendChild(chip);
    }
    panel.appendChild(strip);
  }
  return panel;
}

function eventMarker(event: SequenceEvent, leftPct: number): HTMLElement {
  const marker = el("div", "timeline-marker");
  marker.style.left = `${leftPct}%`;
  marker.dataset.t = String(event.timestamp_s);
  marker.appendChild(el("div", "marker-dot"));
  const label = el("div", "marker-label");
  label.appendChild(el("div", "", `t=${event.timestamp_s.toFixed(1)}s`));
  label.appendChild(el("div", "", `s=${event.s.toFixed(3)}`));
  label.appendChild(el("div", "", `λ=${event.lambda.toFixed(3)}`));
  label.appendChild(el("div", "", `b=${event.b.toFixed(3)}`));
  marker.appendChild(label);
  marker.title = event.caption ?? event.keyframe_id;
  return marker;
}

function renderSequence(seq: FinalSequence, rank: number): HTMLElement {
  const block = el("div", "sequence");
  const header = el("div", "sequence-header");
  header.appendChild(el("span", "sequence-rank", `#${rank}`));
  header.appendChild(el("span", "", `video ${seq.video_id}`));
  header.appendChild(el("span", "sequence-total", `total ${seq.total_final.toFixed(4)}`));
  header.appendChild(el("span", "", `${seq.duration_s.toFixed(1)}s span`));
  block.appendChild(header);

  const track = el("div", "timeline-track");
  const times = seq.events.map((e) => e.timestamp_s);
  const t0 = Math.min(...times);
  const t1 = Math.max(...times);
  const span = t1 - t0;
  for (const event of seq.events) {
    const left = span > 0 ? ((event.timestamp_s - t0) / span) * 100 : 50;
    track.appendChild(eventMarker(event, left));
  }
  block.appendChild(track);
  return block;
}

export function renderTimeline(response: TemporalResponse): HTMLElement {
  const view = el("div", "timeline-view");
  if (!response.sequences.length) {
    view.appendChild(renderEmptyState("no coherent sequence found"));
    return view;
  }
  const ordered = [...response.sequences].sort((a, b) => b.total_final - a.total_final);
  ordered.forEach((seq, i) => view.appendChild(renderSequence(seq, i + 1)));
  return view;
}
