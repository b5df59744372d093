// Wire types mirroring the /v1 JSON API.

export type Modality = "vis" | "ocr" | "asr";
export type Mode = "auto" | "manual";

export interface Weights {
  vis: number;
  ocr: number;
  asr: number;
}

export interface SearchRequest {
  query: string;
  mode: Mode;
  manual_weights?: Weights;
  top_k?: number;
  rerank?: boolean;
}

export interface Plan {
  original: string;
  expansions: string[];
  sub_queries: Partial<Record<Modality, string>>;
  weights: Weights;
  events: string[] | null;
  rationale: string;
  source: string;
}

export interface ResultCandidate {
  keyframe_id: string;
  video_id?: string;
  shot_id?: string;
  timestamp_s?: number;
  caption?: string | null;
  image_uri?: string | null;
  raw: Partial<Record<Modality, number>>;
  normalized: Partial<Record<Modality, number>>;
  fused: number;
  cosines: Record<string, number>;
}

export interface SearchResponse {
  results: ResultCandidate[];
  plan: Plan;
  degraded: boolean;
  timings_ms: Record<string, number>;
}

export interface TemporalRequest {
  query?: string;
  events?: string[];
  alpha?: number;
  beam_width?: number;
  per_event_top_m?: number;
  max_sequences?: number;
  rerank?: boolean;
}

export interface SequenceEvent {
  keyframe_id: string;
  video_id: string;
  timestamp_s: number;
  caption: string | null;
  s: number;
  lambda: number;
  b: number;
  final: number;
}

export interface FinalSequence {
  video_id: string;
  events: SequenceEvent[];
  total_final: number;
  duration_s: number;
}

export interface TemporalResponse {
  sequences: FinalSequence[];
  plan: Plan;
  degraded: boolean;
  timings_ms: Record<string, number>;
}

export interface HealthResponse {
  status: string;
  corpus: { videos: number; keyframes: number } | null;
  config: Record<string, unknown>;
}
