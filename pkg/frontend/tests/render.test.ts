// Rendering contracts: plan weights shown as returned, degraded badge,
// timeline marker ordering, result grid and context panel.

import { describe, expect, it } from "vitest";

import {
  renderContextPanel,
  renderDegradedBadge,
  renderPlan,
  renderResultsGrid,
  renderTimeline,
} from "../src/render.js";
import type {
  Plan,
  ResultCandidate,
  SearchResponse,
  TemporalResponse,
} from "../src/types.js";

function stubPlan(weights = { vis: 0.4, ocr: 0.7, asr: 0.0 }): Plan {
  return {
    original: 'children "Financial Support"',
    expansions: ['children "Financial Support"', "kids with a sign"],
    sub_queries: { vis: "children", ocr: "Financial Support" },
    weights,
    events: null,
    rationale: "sign text is distinctive",
    source: "rule_based",
  };
}

function candidate(id: string, video: string, t: number, fused: number): ResultCandidate {
  return {
    keyframe_id: id,
    video_id: video,
    shot_id: `${video}_s0`,
    timestamp_s: t,
    caption: `caption of ${id}`,
    image_uri: null,
    raw: { vis: 0.9, ocr: 3.0 },
    normalized: { vis: 0.9, ocr: 1.0 },
    fused,
    cosines: { SEM_A: 0.91, SEM_B: 0.88 },
  };
}

function stubSearchResponse(): SearchResponse {
  return {
    results: [
      candidate("v1_s0_k1", "v1", 3.0, 0.92),
      candidate("v1_s2_k0", "v1", 13.0, 0.80),
      candidate("v2_s0_k2", "v2", 5.0, 0.75),
      candidate("v1_s1_k1", "v1", 9.0, 0.60),
    ],
    plan: stubPlan(),
    degraded: false,
    timings_ms: { total: 12.3 },
  };
}

describe("plan panel", () => {
  it("renders the weights returned by the service", () => {
    const panel = renderPlan(stubPlan({ vis: 0.4, ocr: 0.7, asr: 0.0 }));
    const chips = panel.querySelectorAll<HTMLElement>(".weight-chip");
    const byModality = new Map(
      Array.from(chips, (c) => [c.dataset.modality, c.dataset.value]));
    expect(byModality.get("vis")).toBe("0.4");
    expect(byModality.get("ocr")).toBe("0.7");
    expect(byModality.get("asr")).toBe("0");
    expect(panel.textContent).toContain("ocr 0.70");
  });

  it("lists sub-queries and rationale", () => {
    const panel = renderPlan(stubPlan());
    expect(panel.textContent).toContain("Financial Support");
    expect(panel.textContent).toContain("sign text is distinctive");
  });
});

describe("results grid", () => {
  it("renders ranked cards with per-modality bars", () => {
    const grid = renderResultsGrid(stubSearchResponse(), () => {});
    const cards = grid.querySelectorAll(".result-card");
    expect(cards).toHaveLength(4);
    expect(cards[0].querySelector(".rank")?.textContent).toBe("#1");
    const fills = cards[0].querySelectorAll<HTMLElement>(".score-fill");
    const values = Array.from(fills, (f) => Number(f.dataset.value));
    expect(values).toEqual([0.9, 1.0]);
  });

  it("click reports the selected candidate", () => {
    const picked: string[] = [];
    const grid = renderResultsGrid(stubSearchResponse(),
      (c) => picked.push(c.keyframe_id));
    (grid.querySelectorAll(".result-card")[2] as HTMLElement).click();
    expect(picked).toEqual(["v2_s0_k2"]);
  });

  it("degraded badge is visible on degraded responses", () => {
    const badge = renderDegradedBadge();
    expect(badge.classList.contains("degraded")).toBe(true);
    expect(badge.textContent).toBe("degraded");
  });
});

describe("context panel", () => {
  it("shows same-video results ordered by timestamp", () => {
    const response = stubSearchResponse();
    const selected = response.results[1]; // v1 @ 13s
    const panel = renderContextPanel(selected, response);
    const chips = panel.querySelectorAll<HTMLElement>(".context-chip");
    const times = Array.from(chips, (c) => c.textContent);
    expect(times).toEqual(["3.0s", "9.0s", "13.0s"]); // v2 result excluded
    const current = panel.querySelector(".context-chip.current");
    expect(current?.textContent).toBe("13.0s");
  });
});

function stubTemporalResponse(): TemporalResponse {
  const mkEvent = (id: string, t: number, s: number, lam: number, b: number) => ({
    keyframe_id: id, video_id: "v1", timestamp_s: t, caption: `cap ${id}`,
    s, lambda: lam, b, final: s * lam * b,
  });
  return {
    sequences: [
      {
        // deliberately NOT first by total, to exercise the sort
        video_id: "v1",
        events: [mkEvent("a", 30.0, 0.5, 1.0, 0.5), mkEvent("b", 45.0, 0.5, 0.8, 0.5)],
        total_final: 0.45,
        duration_s: 15.0,
      },
      {
        video_id: "v1",
        events: [
          mkEvent("x", 12.0, 0.9, 1.0, 1.0),
          mkEvent("y", 14.5, 0.9, 0.97, 1.0),
          mkEvent("z", 20.0, 0.9, 0.94, 1.0),
        ],
        total_final: 2.61,
        duration_s: 8.0,
      },
    ],
    plan: stubPlan(),
    degraded: false,
    timings_ms: {},
  };
}

describe("timeline view", () => {
  it("renders markers in strictly increasing time order", () => {
    const view = renderTimeline(stubTemporalResponse());
    const top = view.querySelectorAll(".sequence")[0];
    const markers = top.querySelectorAll<HTMLElement>(".timeline-marker");
    expect(markers).toHaveLength(3);
    const times = Array.from(markers, (m) => Number(m.dataset.t));
    expect(times).toEqual([12.0, 14.5, 20.0]);
    for (let i = 1; i < times.length; i++) expect(times[i]).toBeGreaterThan(times[i - 1]);
    const lefts = Array.from(markers, (m) => parseFloat(m.style.left));
    for (let i = 1; i < lefts.length; i++) expect(lefts[i]).toBeGreaterThan(lefts[i - 1]);
  });

  it("orders sequences by total_final descending", () => {
    const view = renderTimeline(stubTemporalResponse());
    const totals = Array.from(
      view.querySelectorAll(".sequence-total"), (n) => n.textContent);
    expect(totals).toEqual(["total 2.6100", "total 0.4500"]);
  });

  it("shows s, lambda and b on each marker", () => {
    const view = renderTimeline(stubTemporalResponse());
    const label = view.querySelector(".marker-label");
    expect(label?.textContent).toContain("s=0.900");
    expect(label?.textContent).toContain("λ=1.000");
    expect(label?.textContent).toContain("b=1.000");
  });

  it("renders the empty state when no sequences", () => {
    const view = renderTimeline({ sequences: [], plan: stubPlan(),
                                  degraded: false, timings_ms: {} });
    expect(view.querySelector(".empty-state")).toBeTruthy();
  });
});
